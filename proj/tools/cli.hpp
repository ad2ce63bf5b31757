#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace loopsim::cli {

/// Process exit codes.
enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitConfig = 2,
  kExitData = 3,
  kExitDiverged = 4,
  kExitInvariant = 5,
};

/// Runs the command line `args` (without the program name). Never throws;
/// errors are reported on `err` and mapped to an ExitCode.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace loopsim::cli
