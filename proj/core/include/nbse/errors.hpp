#pragma once

#include <stdexcept>
#include <string>

namespace nbse {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Invalid configuration or argument values (bad k, malformed base matrix, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// The smallest-eigenvalue curve never crosses zero in the scanned range:
/// the graph is too disordered to have an ordered phase.
class NoTransitionError : public Error {
 public:
  using Error::Error;
};

/// An iterative solver exhausted its budget or a search failed.
class SolverError : public Error {
 public:
  using Error::Error;
};

/// File parsing / serialization problems.
class IoError : public Error {
 public:
  using Error::Error;
};

/// A numeric argument falls outside the representable regime
/// (e.g. beta*max|W| past the sinh overflow guard).
class RangeError : public Error {
 public:
  using Error::Error;
};

}  // namespace nbse
