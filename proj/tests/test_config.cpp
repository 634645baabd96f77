#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "fixtures.hpp"
#include "pfscat/commands.hpp"
#include "pfscat/config.hpp"

using namespace pfscat;
namespace fs = std::filesystem;

namespace {

std::string message_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("pfscat_unit_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("serialization round trip") {
  RunConfig c = fixtures::small_config();
  c.experiment.pairs = {{0, 1}, {2, 3}};
  c.experiment.h = {{1, Scalar(0.25, -3.5)}};
  c.solver.etas = {0.3, 0.15};
  c.run.seed = 123456789012345ULL;
  const std::string text = serialize_config(c);
  CHECK(serialize_config(parse_config(text)) == text);
  const RunConfig back = parse_config(text);
  CHECK(back.experiment.h[0].amplitude == Scalar(0.25, -3.5));
  CHECK(back.run.seed == 123456789012345ULL);
  CHECK(back.experiment.pairs.size() == 2);
}

TEST_CASE("partial files keep defaults") {
  const RunConfig c = parse_config("[model]\ncharge = 0.05\n");
  CHECK(c.model.charge == 0.05);
  CHECK(c.discretization.n_max == RunConfig{}.discretization.n_max);
}

TEST_CASE("malformed configurations name the problem") {
  CHECK(message_of("[model]\nno_such_key = 1\n").find("no_such_key") != std::string::npos);
  CHECK(message_of("[nonsense]\na = 1\n").find("nonsense") != std::string::npos);
  CHECK(message_of("[model\ncharge = 1\n").find("line") != std::string::npos);
  CHECK(message_of("[model]\ncharge = abc\n").find("charge") != std::string::npos);
  CHECK(message_of("[discretization]\nn_max = -1\n").find("n_max") != std::string::npos);
  CHECK(message_of("[experiment]\nf = 0:1\n").find("f") != std::string::npos);
  CHECK_FALSE(message_of("[solver]\netas = 0.2 -0.1\n").empty());
}

TEST_CASE("packets are scattered onto the grid") {
  const PhotonFunction p = packet({{2, Scalar(1.0, 2.0)}, {0, 0.5}}, 4);
  CHECK(p(0) == Scalar(0.5));
  CHECK(p(1) == Scalar(0.0));
  CHECK(p(2) == Scalar(1.0, 2.0));
  CHECK_THROWS_AS(packet({{7, 1.0}}, 4), ConfigError);
}

TEST_CASE("commands: outputs and exit codes") {
  RunConfig c = fixtures::small_config(8, 2, 0.1);
  std::ostringstream log;
  const fs::path out = scratch("gs");
  CHECK(run_command("ground-state", c, out.string(), log) == kExitOk);
  CHECK(fs::exists(out / "report.json"));
  CHECK(fs::exists(out / "timings.json"));
  std::ifstream in(out / "report.json");
  const auto report = nlohmann::json::parse(in);
  CHECK(report["status"] == "pass");
  CHECK(report["command"] == "ground-state");

  CHECK(run_command("no-such", c, scratch("x").string(), log) == kExitConfig);

  RunConfig bad = c;
  bad.experiment.pairs = {{0, 9}};
  CHECK(run_command("tmatrix", bad, scratch("bad").string(), log) == kExitConfig);

  RunConfig stiff = c;
  stiff.solver.iterative = true;
  stiff.solver.max_iter = 1;
  stiff.solver.eig_tol = 1e-17;
  CHECK(run_command("ground-state", stiff, scratch("stiff").string(), log) == kExitSolver);
}
