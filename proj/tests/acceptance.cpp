// Acceptance run: one PASS/FAIL line per criterion.
//
// usage: acceptance <pfscat executable> <configs dir> <scratch dir>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "oracle.hpp"
#include "pfscat/config.hpp"
#include "pfscat/io.hpp"
#include "pfscat/scattering.hpp"
#include "pfscat/suite.hpp"

using namespace pfscat;
namespace fs = std::filesystem;

namespace {

constexpr double kCcrTol = 1e-12;
constexpr int kCcrPairs = 20;
constexpr double kCommTol = 1e-10;
constexpr int kCommStates = 10;
constexpr double kEnergyTol = 1e-10;
constexpr double kStateTol = 1e-8;
constexpr double kDecoupledTol = 1e-10;
constexpr double kHalflineTol = 1e-8;
const std::vector<double> kHalflineEps{0.5, 0.1, 0.05};
constexpr double kAbelianFactor = 5.0;
const std::vector<double> kAbelianEps{0.1, 0.01};
const std::vector<double> kCouplings{0.02, 0.05, 0.1};
constexpr double kPullFactor = 10.0;
constexpr double kPropEps = 0.1;
constexpr int kPropPackets = 3;
constexpr double kQuadratureBudget = 1e-6;
const std::vector<double> kOracleEtas{0.2, 0.1};
constexpr double kOracleRelTol = 1e-8;
const std::vector<double> kSEps{0.4, 0.2, 0.1};
constexpr int kCreationDraws = 50;
constexpr int kCreationOrder = 2;
const std::vector<double> kFormEps{0.5, 0.25};
constexpr double kFormTol = 1e-10;

struct Outcome {
  bool pass;
  std::string detail;
};

int failures = 0;

void report(int id, const std::string& name, const Outcome& o, double seconds) {
  if (!o.pass) ++failures;
  std::printf("%s %2d %-22s %s  (%.1fs)\n", o.pass ? "PASS" : "FAIL", id, name.c_str(), o.detail.c_str(), seconds);
  std::fflush(stdout);
}

template <typename F>
void criterion(int id, const std::string& name, F&& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o{false, ""};
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  report(id, name, o, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
}

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", x);
  return buf;
}

Outcome from_check(const Check& c) {
  std::string d = "measured " + sci(c.measured) + " tol " + sci(c.tolerance);
  for (const auto& [k, v] : c.values)
    if (k == "monotone" || k == "decreasing" || k == "ground_energy") d += " " + k + "=" + fmt(v);
  return {c.pass, d};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 4) {
    std::cerr << "usage: acceptance <pfscat> <configs dir> <scratch dir>\n";
    return 2;
  }
  const std::string cli = argv[1];
  const fs::path configs = argv[2];
  const fs::path scratch = argv[3];

  RunConfig base = load_config((configs / "default.ini").string());
  base.solver.quadrature_budget = kQuadratureBudget;
  const std::uint64_t seed = base.run.seed;
  const PauliFierzModel model = make_model(base);
  const ScatteringProblem problem(model, ground_state(model, ground_state_options(base)), scattering_options(base));
  std::printf("model: dim %lld, modes %lld, n_max %d, E_gs %s\n", static_cast<long long>(model.dim()),
              static_cast<long long>(model.modes().size()), model.fock().n_max(), fmt(problem.ground().energy).c_str());

  criterion(1, "ccr", [&] { return from_check(check_ccr(model.modes(), model.fock(), kCcrPairs, seed, kCcrTol)); });

  criterion(2, "commutators", [&] { return from_check(check_commutators(model, kCommStates, seed + 1, kCommTol)); });

  criterion(3, "decoupling", [&] {
    const RunConfig c = load_config((configs / "decoupled.ini").string());
    if (c.model.charge != 0.0) return Outcome{false, "decoupled.ini must set charge = 0"};
    const PauliFierzModel m = make_model(c);
    const ScatteringProblem p(m, ground_state(m, ground_state_options(c)), scattering_options(c));
    const double s = c.model.potential.strength;
    const oracle::Model atom = oracle::build(c.discretization.matter_points, c.discretization.half_width,
                                             [s](double x) { return s * x * x; }, {}, 0);
    const oracle::Ground at = oracle::atomic(atom);
    const double de = std::abs(p.ground().energy - at.energy);

    const Index nf = m.fock().size();
    const Index vac = m.fock().index_of(FockBasis::Occupation(static_cast<std::size_t>(m.modes().size()), 0));
    Vector product = Vector::Zero(m.dim());
    for (Index a = 0; a < m.matter().dim(); ++a) product(a * nf + vac) = at.state(a);
    const Scalar overlap = product.dot(p.ground().state);
    const double dpsi = (p.ground().state - overlap / std::abs(overlap) * product).norm();

    std::vector<std::pair<Index, Index>> pairs;
    for (Index k = 0; k < m.modes().size(); ++k)
      for (Index kp = 0; kp < m.modes().size(); ++kp) pairs.emplace_back(k, kp);
    double tmax = 0.0;
    for (const auto& r : t_matrix_table(p, pairs, c.solver.etas)) tmax = std::max(tmax, std::abs(r.value));

    const PhotonFunction f = packet(c.experiment.f, m.modes().size());
    double lhs = 0.0, rhs = 0.0;
    for (const auto& h : {c.experiment.h, c.experiment.h_disjoint}) {
      for (double e : kSEps) {
        const SMatrixResult r = p.s_matrix(f, packet(h, m.modes().size()), e);
        lhs = std::max({lhs, std::abs(r.lhs), std::abs(r.lhs_resolvent)});
        rhs = std::max(rhs, std::abs(r.rhs));
      }
    }
    const bool ok = de <= kEnergyTol && dpsi <= kStateTol && tmax <= kDecoupledTol && lhs <= kDecoupledTol &&
                    rhs <= kDecoupledTol;
    return Outcome{ok, "|dE| " + sci(de) + " |dpsi| " + sci(dpsi) + " max|T| " + sci(tmax) + " max|LHS| " +
                           sci(lhs) + " max|RHS| " + sci(rhs)};
  });

  criterion(4, "halfline_integral",
            [&] { return from_check(check_halfline(problem, kHalflineEps, seed + 2, kHalflineTol)); });

  criterion(5, "abelian_limit", [&] {
    struct Family {
      const char* name;
      std::function<double(double)> f;
      double limit;
    };
    const std::vector<Family> families{
        {"exp", [](double s) { return std::exp(-s); }, 1.0},
        {"exp_cos", [](double s) { return std::exp(-s) * std::cos(s); }, 0.5},
        {"indicator", [](double s) { return s <= 1.0 ? 1.0 : 0.0; }, 1.0},
    };
    bool ok = true;
    double worst = 0.0;
    for (const auto& fam : families) {
      const AbelianResult r = abelian_limit(fam.f, kAbelianEps);
      for (std::size_t i = 0; i < kAbelianEps.size(); ++i) {
        const double gap = std::abs(r.integrals[i] - fam.limit) / kAbelianEps[i];
        worst = std::max(worst, gap);
        ok = ok && gap <= kAbelianFactor;
      }
    }
    return Outcome{ok, "max |I(eps) - limit| / eps " + sci(worst) + " tol " + sci(kAbelianFactor)};
  });

  criterion(6, "pull_through", [&] {
    const ModelFactory make = [&](double e, int n) { return make_model(base, e, n); };
    return from_check(check_pull_through(make, kCouplings, 2, 3, ground_state_options(base), solve_options(base),
                                         kPullFactor));
  });

  criterion(7, "prop_tmat", [&] {
    if (problem.options().quadrature_budget != kQuadratureBudget) return Outcome{false, "budget not pinned"};
    return from_check(check_prop_tmat(problem, kPropPackets, kPropEps, seed + 4));
  });

  criterion(8, "dense_oracle", [&] {
    if (model.dim() > 4000) return Outcome{false, "dimension above 4000"};
    std::vector<oracle::Photon> photons;
    for (const auto& m : model.modes().modes()) photons.push_back({m.k(0), m.weight, m.kappa});
    const double s = base.model.potential.strength;
    const oracle::Model ora = oracle::build(base.discretization.matter_points, base.discretization.half_width,
                                            [s](double x) { return s * x * x; }, photons, base.discretization.n_max);
    const oracle::Ground g = oracle::ground(ora);
    oracle::TMatrix t(ora, g);
    double worst = 0.0;
    int entries = 0;
    for (double eta : kOracleEtas) {
      for (Index k = 0; k < model.modes().size(); ++k) {
        for (Index kp = 0; kp < model.modes().size(); ++kp) {
          const Scalar expect = t(static_cast<int>(k), static_cast<int>(kp), eta);
          const Scalar got = problem.t_matrix(k, kp, eta).value;
          worst = std::max(worst, std::abs(got - expect) / std::abs(expect));
          ++entries;
        }
      }
    }
    return Outcome{worst <= kOracleRelTol,
                   std::to_string(entries) + " entries, max rel err " + sci(worst) + " tol " + sci(kOracleRelTol)};
  });

  criterion(9, "s_matrix", [&] {
    const Index modes = model.modes().size();
    const PhotonFunction f = packet(base.experiment.f, modes);
    struct Pair {
      const char* name;
      PhotonFunction h;
    };
    const std::vector<Pair> pairs{{"shared", packet(base.experiment.h, modes)},
                                  {"disjoint", packet(base.experiment.h_disjoint, modes)}};
    bool ok = true;
    std::string detail;
    for (const auto& pr : pairs) {
      double worst = 0.0;
      std::vector<double> ratios;
      double on_max = 0.0;
      for (double e : kSEps) {
        const SMatrixResult r = problem.s_matrix(f, pr.h, e);
        ok = ok && r.discrepancy <= r.budget;
        worst = std::max(worst, r.discrepancy / r.budget);
        on_max = std::max(on_max, std::abs(r.rhs_on_shell));
        ratios.push_back(std::abs(r.rhs_on_shell) / std::abs(r.rhs_off_shell));
      }
      detail += std::string(pr.name) + ": max |L-R|/budget " + sci(worst);
      if (std::string(pr.name) == "shared") {
        bool increasing = true;
        for (std::size_t i = 1; i < ratios.size(); ++i) increasing = increasing && ratios[i] > ratios[i - 1];
        ok = ok && increasing;
        detail += " on/off";
        for (double r : ratios) detail += " " + sci(r);
        detail += increasing ? " increasing; " : " NOT increasing; ";
      } else {
        // no shell in common: the on-shell part must vanish identically
        ok = ok && on_max == 0.0;
        detail += " on-shell RHS " + sci(on_max);
      }
    }
    return Outcome{ok, detail};
  });

  criterion(10, "creation_form_bounds", [&] {
    const Check cb = check_creation_bound(model.modes(), model.fock(), kCreationOrder, kCreationDraws, seed + 3);
    const RunConfig dw = load_config((configs / "double_well.ini").string());
    const PauliFierzModel m = make_model(dw);
    bool has_negative = false;
    for (Index a = 0; a < m.potential_values().size(); ++a) has_negative = has_negative || m.potential_values()(a) < 0.0;
    const Check fb = check_form_bound(m, kFormEps, kFormTol);
    const Outcome a = from_check(cb), b = from_check(fb);
    return Outcome{cb.pass && fb.pass && has_negative,
                   "creation: " + a.detail + "; form (double well, V_- != 0: " + (has_negative ? "yes" : "no") +
                       "): " + b.detail};
  });

  criterion(11, "reproducibility", [&] {
    const std::vector<std::string> commands{"ground-state", "verify", "tmatrix", "smatrix", "sweep"};
    const fs::path cfg = configs / "quick.ini";
    fs::remove_all(scratch);
    auto run = [&](const std::string& cmd, const fs::path& out, const std::string& extra) {
      const std::string line = "\"" + cli + "\" " + cmd + " --config \"" + cfg.string() + "\" --out \"" +
                               out.string() + "\"" + extra + " > /dev/null 2>&1";
      return std::system(line.c_str());
    };
    int compared = 0;
    std::string bad;
    for (const auto& cmd : commands) {
      const fs::path a = scratch / "run1" / cmd, b = scratch / "run2" / cmd;
      if (run(cmd, a, "") != 0 || run(cmd, b, "") != 0) {
        bad += " " + cmd + ":exit";
        continue;
      }
      std::map<std::string, std::string> fa, fb;
      for (const auto& e : fs::directory_iterator(a))
        if (e.path().filename() != "timings.json") fa[e.path().filename().string()] = slurp(e.path());
      for (const auto& e : fs::directory_iterator(b))
        if (e.path().filename() != "timings.json") fb[e.path().filename().string()] = slurp(e.path());
      if (fa != fb) bad += " " + cmd;
      for (const auto& [name, body] : fa) {
        const auto ext = fs::path(name).extension();
        if (ext == ".csv" || ext == ".json") ++compared;
      }
    }
    // the T table must not depend on the thread count either
    const fs::path threaded = scratch / "threads" / "tmatrix";
    if (run("tmatrix", threaded, " --threads 3") != 0 ||
        slurp(threaded / "tmatrix.csv") != slurp(scratch / "run1" / "tmatrix" / "tmatrix.csv"))
      bad += " tmatrix(threads)";
    return Outcome{bad.empty() && compared > 0,
                   std::to_string(compared) + " CSV/JSON files byte-identical" + (bad.empty() ? "" : "; differ:" + bad)};
  });

  std::printf("%s: %d failing criteria\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
