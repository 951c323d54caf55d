#pragma once

#include <stdexcept>
#include <string>

namespace moscal {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed instance file (bad JSON, missing or mistyped field).
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Well-formed input that breaks a model invariant (p < 2, lb > ub, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Enumeration or generation request exceeding a desk-scale guard.
class TooLarge : public Error {
 public:
  using Error::Error;
};

/// Basis stayed singular after repair, or the simplex lost accuracy.
class NumericalFailure : public Error {
 public:
  using Error::Error;
};

class LimitExceeded : public Error {
 public:
  using Error::Error;
};

class InfeasibleModel : public Error {
 public:
  using Error::Error;
};

}  // namespace moscal
