#pragma once

#include <stdexcept>
#include <string>

namespace beable {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input: non-Hermitian matrices, bad state
/// literals, operands living on different Hilbert spaces.
class ValidationError : public Error {
public:
  using Error::Error;
};

class DimensionMismatch : public ValidationError {
public:
  DimensionMismatch(std::string_view what, long lhs, long rhs)
      : ValidationError(std::string(what) + ": dimension mismatch (" +
                        std::to_string(lhs) + " vs " + std::to_string(rhs) +
                        ")") {}
};

/// A documented precondition of an operation does not hold. The message
/// names the violated contract.
class PreconditionError : public ValidationError {
public:
  using ValidationError::ValidationError;
};

/// Floating point trouble: eigensolver divergence, invariants of a
/// computed object failing their tolerance checks.
class NumericalError : public Error {
public:
  using Error::Error;
};

} // namespace beable
