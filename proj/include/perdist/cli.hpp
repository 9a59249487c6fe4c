#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace perdist {

/// Exit codes: 0 success, 1 verified negative outcome, 2 bad input.
enum ExitCode : int { exit_ok = 0, exit_negative = 1, exit_input = 2 };

/// Runs the command line `args` (without the program name). Reports go to
/// `out` unless --out names a file; diagnostics go to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace perdist
