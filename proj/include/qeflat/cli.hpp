#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qeflat {

/// Exit codes of the command-line driver.
enum ExitCode : int {
  kExitPass = 0,
  kExitFail = 1,
  kExitUsage = 2,
  kExitPrecondition = 3,
};

/// Runs the driver on `args` (args[0] is the program name). Reports go to
/// `out`, diagnostics and usage text to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qeflat
