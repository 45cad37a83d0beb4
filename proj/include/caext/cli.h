#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace caext {

/// Exit codes of the command-line driver.
enum ExitCode : int
{
  EXIT_VERDICT = 0,
  EXIT_USAGE = 1,
  EXIT_INTERNAL = 2,
  EXIT_RESOURCE = 3,
};

/// Runs one command (`solve`, `validate`, `fuzz` or `gen`); `args` excludes
/// the program name. Verdicts go to `out`, diagnostics and stats to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace caext
