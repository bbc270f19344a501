#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace prodsurf {

/// Exit codes of the command-line front end.
enum ExitCode : int {
  kExitOk = 0,
  kExitInternal = 1,
  kExitInput = 2,
  kExitNonConvergence = 3,  ///< also: residuals above the configured tolerance
  kExitDegenerated = 4,
};

/// Runs the prodsurf command line. `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace prodsurf
