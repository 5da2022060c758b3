#pragma once

#include <stdexcept>
#include <string>

namespace satrand {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed DIMACS, OPB, policy, sidecar or key input.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// A precondition on the shape of an input was violated
/// (clause width, matrix dimensions, field widths, ...).
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// A derandomized or decoded result does not satisfy the original problem.
/// Raised when a provider answer is fraudulent (or when there is a bug).
class FraudDetected : public Error {
 public:
  using Error::Error;
};

/// A secret was applied to an instance it was not generated for.
class DigestMismatch : public Error {
 public:
  using Error::Error;
};

/// An exhaustive oracle was asked to enumerate beyond its configured limit.
class LimitExceeded : public Error {
 public:
  using Error::Error;
};

/// Randomized generation gave up after its retry budget.
class RetryBudgetExhausted : public Error {
 public:
  using Error::Error;
};

}  // namespace satrand
