#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "cli/config.hpp"

namespace pipeslip::cli {

enum ExitCode : int {
  exit_ok = 0,
  exit_config_error = 2,
  exit_numerical_failure = 3,
  exit_gate_failure = 4,
};

struct CommandOptions {
  std::filesystem::path out_dir = ".";
  Overrides overrides;
};

const std::vector<std::string>& command_names();

// Parses the configuration for `command`, runs it and writes its artifacts
// into options.out_dir. Errors are reported on `log` and mapped to exit codes.
int run_command(std::string_view command, ConfigReader& reader, const CommandOptions& options,
                std::ostream& log);
int run_command_file(std::string_view command, const std::filesystem::path& config_path,
                     const CommandOptions& options, std::ostream& log);

}  // namespace pipeslip::cli
