#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace matfn::cli {

/// Process exit codes.
enum ExitCode : int {
  kSuccess = 0,
  kUsage = 1,         // bad arguments, unreadable or malformed files
  kPrecondition = 2,  // existence / precondition failure
  kNumerical = 3,     // numerical failure
};

/// Runs the `matfn` command line. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace matfn::cli
