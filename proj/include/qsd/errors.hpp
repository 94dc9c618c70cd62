#pragma once

#include <stdexcept>
#include <string>

namespace qsd {

/// Root of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Precondition or configuration violation (bad sizes, out-of-range inputs).
class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// A closed-form expression left its real domain (negative radicand, zero denominator,
/// or a singular endpoint that only has a limit value).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Non-finite values met during integration.
class NumericError : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double residual, int iterations)
      : Error(what), residual_(residual), iterations_(iterations) {}

  [[nodiscard]] double residual() const noexcept { return residual_; }
  [[nodiscard]] int iterations() const noexcept { return iterations_; }

 private:
  double residual_;
  int iterations_;
};

/// An eigenfunction that must be strictly positive has a zero or negative entry.
class PositivityError : public Error {
 public:
  using Error::Error;
};

class DegenerateOperatorError : public Error {
 public:
  using Error::Error;
};

class UnderflowError : public Error {
 public:
  using Error::Error;
};

class InsufficientSurvivorsError : public Error {
 public:
  using Error::Error;
};

/// Two independent routes disagree where they must agree (e.g. a numeric sweep
/// contradicting a theorem-range stamp).
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

}  // namespace qsd
