#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace vibronic::cli {

enum ExitCode : int { kSuccess = 0, kValidation = 1, kNumerical = 2, kIo = 3 };

struct CommandResult {
  int exit_code = kSuccess;
  std::string out;  // human-readable summary
  std::string err;  // diagnostics, nonempty exactly when exit_code != 0
};

/// Runs `vibronic <args...>` in process. `args` excludes the program name.
CommandResult run(const std::vector<std::string>& args);

/// Entry point used by the executable.
int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace vibronic::cli
