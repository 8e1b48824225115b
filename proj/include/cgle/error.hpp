#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cgle {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Vector or grid sizes that do not fit together.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Violated precondition on an input value (T <= 0, R <= k^2, non-finite data, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// An iterative solver or integrator did not deliver a usable result.
class SolverFailure : public Error {
 public:
  using Error::Error;
};

/// Malformed solution file; carries the 1-based line number of the offending line.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace cgle
