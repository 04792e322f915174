#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cexpr {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed expression text. Carries the byte offset of the failure.
class ParseError : public Error {
public:
  ParseError(const std::string& what, std::size_t position)
      : Error("parse error at position " + std::to_string(position) + ": " + what),
        position_(position) {}

  std::size_t position() const noexcept { return position_; }

private:
  std::size_t position_;
};

/// Evaluation failure: unbound variable or a domain error (log of a
/// non-positive value, division by zero, derivative at a kink, ...).
class EvalError : public Error {
public:
  using Error::Error;
};

/// Structurally invalid input to a constructor or builder: bad domain
/// bounds, duplicate constraints, incompatible slices, unsupported orders.
class InvalidSpec : public Error {
public:
  using Error::Error;
};

/// A linear solve failed or is untrustworthy (singular or ill-conditioned
/// functional matrix, rank-deficient collocation system).
class SolveError : public Error {
public:
  using Error::Error;
};

/// Malformed run configuration document.
class ConfigError : public Error {
public:
  using Error::Error;
};

} // namespace cexpr
