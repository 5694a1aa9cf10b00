#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace swipt {

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitParse = 2,
  kExitInfeasible = 3,
  kExitNotConverged = 4,
  kExitTooLarge = 5,
};

/// Entry point of the `swipt` tool. `args` excludes the program name.
/// The one-line summary goes to `out`, diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace swipt
