#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fde::cli {

enum ExitCode : int {
  kOk = 0,
  kInternal = 1,
  kUsage = 2,
  kFailed = 3,  // verification failed, no convergence, construction failed
};

/// Runs the command line `args` (without the program name). Results go to
/// files and `out`; diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fde::cli
