#pragma once

#include <stdexcept>
#include <string>

namespace curlkit {

// Bad user input. CLI maps this to exit code 1.
struct ValidationError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Anything that went wrong inside the numerics. CLI exit code 2.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConstraintViolation : NumericalError {
  using NumericalError::NumericalError;
};

struct SubspaceNotInvariant : NumericalError {
  using NumericalError::NumericalError;
};

struct EigenNoConvergence : NumericalError {
  using NumericalError::NumericalError;
};

struct Blowup : NumericalError {
  Blowup(const std::string& what, long step_) : NumericalError(what), step(step_) {}
  long step;
};

}  // namespace curlkit
