#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "sqz/error.hpp"

namespace sqz::cli {

/// Process exit codes.
enum ExitCode : int {
  kOk = 0,
  kConfigError = 2,         ///< bad flags, config file or input data
  kModelError = 3,          ///< e.g. q above the OPO threshold
  kNonConvergence = 4,
  kDegenerateJacobian = 5,
};

int exit_code_for(ErrorCode code);

/// Runs the tool with argv-style arguments (args[0] is the program name).
/// Data and output paths go to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sqz::cli
