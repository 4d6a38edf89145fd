#pragma once

#include <iosfwd>

namespace chemostokes {

/// Exit codes of the command-line driver.
enum ExitCode : int {
  kExitOk = 0,
  kExitVerificationFailed = 1,
  kExitRejected = 2,
  kExitConfigError = 3,
};

/// simulate | verify | feasibility | sweep | convergence
int cli_main(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace chemostokes
