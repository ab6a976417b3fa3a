#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "dimwit/json_io.hpp"

namespace dimwit::cli {

// Stable process exit codes.
enum ExitCode : int {
  kOk = 0,
  kCheckFailed = 1,     // verify-tables mismatch, replay mismatch
  kDomainError = 2,     // bad arguments, malformed input files
  kResourceGuard = 3,   // enumeration guard exceeded
  kMissingData = 4,     // bundled data files not found
  kStaleBoundTable = 5, // bound table missing or produced by another config
};

inline constexpr const char* kVersion = "1.0.0";

struct CommandResult {
  json outputs;
  int exit_code = kOk;
  std::string text;  // terminal rendering
  std::string csv;   // plot-ready rendering
};

struct RunOptions {
  unsigned workers = 0;  // 0: available parallelism
  std::ostream* log = nullptr;
};

// Built-in defaults for a command's config object.
json default_config(std::string_view command);

// Runs one command from a fully resolved config. Exceptions from the
// library propagate; `exit_code_for` maps them.
CommandResult run_command(std::string_view command, const json& config, const RunOptions& options);

int exit_code_for(const std::exception& e);

// {"tool", "version", "command", "argv", "config", "seed", "outputs", "exit_code", "timing"}
json make_report(std::string_view command, const std::vector<std::string>& argv, const json& config,
                 const CommandResult& result, double wall_seconds);

// Re-executes the command embedded in a report and compares outputs.
CommandResult replay(const json& report, const RunOptions& options);

// Full command-line entry point; stdout gets only the report rendering,
// diagnostics go to err.
int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace dimwit::cli
