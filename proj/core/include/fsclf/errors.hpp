#pragma once

#include <stdexcept>
#include <string>

namespace fsclf {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A vector or matrix argument has the wrong dimensions.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A computation produced NaN or infinity.
class NonFiniteError : public Error {
 public:
  using Error::Error;
};

/// An argument or configuration value violates a documented precondition.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// The numerical solver failed in a way that is not plain infeasibility.
class SolverError : public Error {
 public:
  using Error::Error;
};

/// A file could not be read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace fsclf
