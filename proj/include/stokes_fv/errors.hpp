#pragma once

#include <stdexcept>
#include <string>

namespace stokes_fv {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidGrid : public Error {
 public:
  using Error::Error;
};

class PartitionError : public Error {
 public:
  using Error::Error;
};

/// Fields or partitions that do not belong to the grid they are used with.
class GridMismatch : public Error {
 public:
  using Error::Error;
};

/// Inconsistent scheme parameters or run configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Factorization breakdown, unconverged residual, or dimension caps.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace stokes_fv
