#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "pfscat/config.hpp"

namespace pfscat {

enum ExitCode : int { kExitOk = 0, kExitConfig = 1, kExitSolver = 2, kExitCheckFailed = 3 };

/// Subcommand names accepted by run_command.
const std::vector<std::string>& command_names();

/// Run one subcommand, writing report.json, timings.json and the command's
/// data files into out_dir. Progress and failures go to `log`. Returns the
/// exit code; ConfigError and SolverError are mapped to 1 and 2.
int run_command(const std::string& name, const RunConfig& config, const std::string& out_dir, std::ostream& log);

}  // namespace pfscat
