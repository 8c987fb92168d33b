#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace robustprice::cli {

/// Exit codes of the command-line front end.
enum ExitCode : int {
  kOk = 0,
  kInvalidInput = 2,
  kInfeasibleSet = 3,
  kNumericalFailure = 4,
};

/// Runs one subcommand. `args` excludes the program name. Documents go to
/// `out` (or --out), diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace robustprice::cli
