#pragma once

#include <stdexcept>
#include <string>

namespace twpa {

// Base for every error raised by the library. The CLI maps the concrete
// type onto an exit code, so keep the hierarchy flat.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A caller-supplied value is outside the documented domain.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// The data is well-formed but violates a physical or structural invariant
// (non-symmetric covariance, unphysical state, non-positive determinant).
class InvalidState : public Error {
 public:
  using Error::Error;
};

// An iterative method did not converge.
class NumericFailure : public Error {
 public:
  using Error::Error;
};

// A file could not be opened, read or written, or its contents are malformed.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace twpa
