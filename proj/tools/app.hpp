#pragma once

// Scenario orchestration behind the command-line tool.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "config.hpp"

namespace nlgs::app {

enum ExitCode : int {
  exit_ok = 0,
  exit_usage = 1,
  exit_config = 2,
  exit_solver = 3,
  exit_oracle = 4,
};

struct RunOptions {
  /// Overrides ScenarioConfig::output_dir when set.
  std::optional<std::filesystem::path> out_dir;
  /// Reserved; echoed into provenance only.
  std::optional<long> seed;
};

/// Runs one command and writes its artifacts. Diagnostics and warnings go to
/// `log`. Returns an ExitCode; library errors are mapped, not rethrown.
int run(const std::string& command, const ScenarioConfig& config, const RunOptions& options, std::ostream& log);

/// Loads the config file and runs; config errors map to exit_config.
int run_file(const std::string& command, const std::filesystem::path& config_path, const RunOptions& options,
             std::ostream& log);

}  // namespace nlgs::app
