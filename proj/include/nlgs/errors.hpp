#pragma once

#include <stdexcept>
#include <string>

namespace nlgs {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Two fields (or a field and an operator) live on different grids.
class GridMismatch : public Error {
 public:
  GridMismatch() : Error("grid mismatch") {}
  explicit GridMismatch(const std::string& where) : Error("grid mismatch: " + where) {}
};

/// A precondition on an argument was violated (bad parameter, geometry, size cap).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A numerical assertion failed: non-convergence, lost positivity, large
/// imaginary residue, monotonicity violation, instability.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Malformed or semantically invalid scenario configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace nlgs
