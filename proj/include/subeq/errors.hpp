#pragma once

#include <stdexcept>
#include <string>

namespace subeq {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Bad argument shape or value (dimension mismatch, non-finite input, out-of-range id).
class DomainError : public Error {
public:
  using Error::Error;
};

/// A symmetric factorization failed: the matrix is not positive definite within tolerance.
class SolveError : public Error {
public:
  using Error::Error;
};

/// An action step or sequence violates the network model.
class ValidationError : public Error {
public:
  using Error::Error;
};

/// An operation was called outside its precondition.
class PreconditionError : public Error {
public:
  using Error::Error;
};

/// The conserved sums drifted. Signals an implementation bug.
class ConservationError : public Error {
public:
  using Error::Error;
};

/// Malformed configuration or serialized document.
class ConfigError : public Error {
public:
  using Error::Error;
};

}  // namespace subeq
