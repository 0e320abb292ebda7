#pragma once

#include <stdexcept>
#include <string>

namespace cymono {

// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or inconsistent input data (shapes, invariants, schema).
class InvalidInputError : public Error {
 public:
  using Error::Error;
};

// A configured size guard (tensor entries, LP variables, factorial
// enumeration) would be exceeded.
class CapExceededError : public Error {
 public:
  using Error::Error;
};

// A feasibility-type failure, e.g. an envelope query outside the convex
// hull of the sample points.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

// An operation that requires a (jointly) monotone input was handed one
// that fails the check.
class NotMonotoneError : public Error {
 public:
  using Error::Error;
};

// An iteration did not reach its tolerance within the step budget.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

// File and serialization problems.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace cymono
