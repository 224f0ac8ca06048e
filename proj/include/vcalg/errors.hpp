#pragma once

#include <stdexcept>
#include <string>

namespace vcalg {

/// Root of the library's exception hierarchy.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input: unparsable numbers, CSV or JSON files.
class InputError : public Error {
 public:
  using Error::Error;
};

/// Data that violates a modelling assumption (fewer than two groups, all
/// groups of size one, rank-deficient design, ...).
class ModelAssumptionError : public Error {
 public:
  using Error::Error;
};

/// Data on the measure-zero set where the algebraic analysis breaks down,
/// e.g. a vanishing within-group sum of squares.
class DegenerateDataError : public Error {
 public:
  using Error::Error;
};

/// An operation was called on arguments for which it is undefined,
/// such as the gcd of two zero polynomials.
class UndefinedInputError : public Error {
 public:
  using Error::Error;
};

/// A polynomial division that was required to be exact left a remainder.
class DivisibilityError : public Error {
 public:
  using Error::Error;
};

/// A caller-supplied object does not satisfy the documented precondition
/// (uncertified root interval, wrong variable degree, ...).
class ContractViolation : public Error {
 public:
  using Error::Error;
};

}  // namespace vcalg
