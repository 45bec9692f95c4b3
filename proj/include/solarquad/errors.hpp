#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace solarquad {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed text input. `line()` is 1-based.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  [[nodiscard]] std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Data that parses but violates a structural invariant (ordering, sign, size).
class StructuralError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the interval an object is defined on.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// An integrand or test function returned a non-finite value.
class EvaluationError : public Error {
 public:
  EvaluationError(double abscissa, const std::string& what)
      : Error(what + " at " + std::to_string(abscissa)), abscissa_(abscissa) {}
  [[nodiscard]] double abscissa() const noexcept { return abscissa_; }

 private:
  double abscissa_;
};

/// Rule construction failed (moment non-convergence, loss of orthogonality).
class ConstructionError : public Error {
 public:
  explicit ConstructionError(const std::string& what, double error_estimate = 0.0)
      : Error(what), error_estimate_(error_estimate) {}
  [[nodiscard]] double error_estimate() const noexcept { return error_estimate_; }

 private:
  double error_estimate_;
};

/// Eigen-iteration failure or numerical degeneracy.
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace solarquad
