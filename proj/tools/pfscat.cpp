#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "pfscat/commands.hpp"
#include "pfscat/config.hpp"

int main(int argc, char** argv) {
  CLI::App app{"One-photon scattering off a ground state of a discretized Pauli-Fierz model"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;

  for (const auto& name : pfscat::command_names()) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "INI run configuration")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "output directory")->capture_default_str();
    sub->add_option("--seed", seed, "overrides [run] seed");
    sub->add_option("--threads", threads, "overrides [run] threads")->check(CLI::PositiveNumber);
  }
  CLI::App* show = app.add_subcommand("show-config", "print the canonical configuration with every key");
  show->add_option("--config", config_path, "INI run configuration (defaults if omitted)")->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return pfscat::kExitConfig;
  }

  pfscat::RunConfig config;
  try {
    if (!config_path.empty()) config = pfscat::load_config(config_path);
    if (seed) config.run.seed = *seed;
    if (threads) config.run.threads = *threads;
    pfscat::validate(config);
  } catch (const pfscat::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return pfscat::kExitConfig;
  }

  if (show->parsed()) {
    std::cout << pfscat::serialize_config(config);
    return pfscat::kExitOk;
  }
  for (const auto& name : pfscat::command_names())
    if (app.got_subcommand(name)) return pfscat::run_command(name, config, out_dir, std::cerr);
  return pfscat::kExitConfig;
}
