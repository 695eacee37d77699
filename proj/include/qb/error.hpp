#pragma once

#include <stdexcept>
#include <string>

namespace qb {

enum class ErrorCode {
  InvalidArgument,   // out-of-range or malformed parameter
  NotHermitian,      // eigen/evolution input fails the Hermiticity check
  InvalidState,      // density-matrix invariant violated
  NoSteadyState,     // steady state requested with zero decay
  ValidationFailed,  // a cross-check or oracle comparison failed
  Config,            // unknown or malformed configuration key
  Io,
};

// Single exception type for the library; the code drives CLI exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace qb
