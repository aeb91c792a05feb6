#pragma once

#include <stdexcept>
#include <string>

namespace conslab {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on user-supplied parameters was violated.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A numerical routine could not produce a trustworthy result.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace conslab
