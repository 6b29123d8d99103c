#pragma once

#include <charconv>
#include <stdexcept>
#include <string>

namespace subdiff {

// Base for every failure raised by the library. The CLI maps the subclasses
// onto exit codes, so new error kinds should derive from one of these.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Numerical tolerance not reached (quadrature, fits, cross-route checks).
class ToleranceError : public Error {
 public:
  using Error::Error;
};

class QuadratureError : public ToleranceError {
 public:
  using ToleranceError::ToleranceError;
};

class FitError : public ToleranceError {
 public:
  using ToleranceError::ToleranceError;
};

/// A snapshot grid does not cover the requested region.
class CoverageError : public Error {
 public:
  using Error::Error;
};

/// An experiment violates the hypotheses of the theorem it checks.
class HypothesisError : public Error {
 public:
  using Error::Error;
};

class ResourceError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Shortest decimal that round-trips, for messages and serialized specs.
inline std::string shortest(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace subdiff
