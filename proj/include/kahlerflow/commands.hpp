// The three command-line workflows. Each takes a resolved configuration,
// writes its files into output_dir and returns an exit code.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "kahlerflow/config.hpp"

namespace kflow {

enum ExitCode : int {
  kExitOk = 0,
  kExitPropertyFailure = 1,
  kExitConfigError = 2,
  kExitNumerical = 3,
};

struct CommandLine {
  std::string command;
  std::optional<std::string> config_path;
  std::vector<std::string> overrides;  // key=value
  std::optional<std::string> output_dir;
  std::optional<std::uint64_t> seed;
};

/// defaults < config file < --set < --output/--seed. Throws ConfigError.
Json resolve_config(const CommandLine& cl);

/// Writes identities_report.json.
int cmd_identities(const Json& config, std::ostream& log);
/// Writes ode_runs.csv and ode_summary.json.
int cmd_ode(const Json& config, std::ostream& log);
/// Writes lattice_steps.csv, lattice_summary.json and snapshot_<step>.bin.
int cmd_lattice(const Json& config, std::ostream& log);

/// resolve_config + dispatch, mapping every exception to an exit code.
int run_command(const CommandLine& cl, std::ostream& log, std::ostream& err);

}  // namespace kflow
