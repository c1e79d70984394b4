#pragma once

#include <stdexcept>
#include <string>

namespace bellman {

/// Base class for all solver errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside a function's domain (table range, invalid family parameter, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Malformed family spec string or file format.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Derivative requested at a point where it does not exist.
class NonDifferentiableError : public Error {
 public:
  using Error::Error;
};

/// A concavity certificate failed; carries the first offending abscissa.
class RegimeError : public Error {
 public:
  RegimeError(const std::string& msg, double u) : Error(msg), first_violation(u) {}
  double first_violation;
};

/// Root bracketing failed (signals a different foliation regime).
class NoRootError : public Error {
 public:
  using Error::Error;
};

/// A chord differential reached zero; the chordal regime ends here.
class DegenerateChordError : public Error {
 public:
  DegenerateChordError(const std::string& msg, double ell_at) : Error(msg), ell(ell_at) {}
  double ell;
};

/// Newton corrector diverged during continuation.
class StepSizeError : public Error {
 public:
  using Error::Error;
};

/// Iteration cap exceeded; carries the last sup-delta.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& msg, double last) : Error(msg), last_sup_delta(last) {}
  double last_sup_delta;
};

/// None of the supported foliation regimes apply.
class UnsupportedFoliationError : public Error {
 public:
  using Error::Error;
};

/// Evaluation point lies outside the constructed figures.
class CoverageError : public Error {
 public:
  using Error::Error;
};

}  // namespace bellman
