#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "qb/error.hpp"

namespace qb {

// Process exit status per failure class.
enum ExitCode : int {
  kExitOk = 0,
  kExitUnexpected = 1,
  kExitUsage = 2,
  kExitConfig = 3,
  kExitInvalidArgument = 4,
  kExitNoSteadyState = 5,
  kExitValidation = 6,
  kExitIo = 7,
  kExitInvalidState = 8,
  kExitNotHermitian = 9,
};

int exit_code_for(ErrorCode code);

// args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qb
