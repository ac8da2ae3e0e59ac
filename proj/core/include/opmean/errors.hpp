#pragma once

#include <stdexcept>
#include <string>

namespace opmean {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// A mathematically invalid input (wrong dimensions, spectrum outside a
/// function's domain, non-positive-definite matrix, ...).
class DomainError : public Error {
  public:
    using Error::Error;
};

/// A structurally degenerate problem (flat objective, weight parameter at an
/// endpoint) that the solvers refuse to iterate on.
class DegenerateError : public DomainError {
  public:
    using DomainError::DomainError;
};

/// Malformed file content or an unrecognized descriptor string.
class ParseError : public Error {
  public:
    using Error::Error;
};

/// An internal numerical failure (eigensolver non-convergence and the like).
class NumericalError : public Error {
  public:
    using Error::Error;
};

} // namespace opmean
