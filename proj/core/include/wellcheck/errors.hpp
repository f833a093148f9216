#pragma once

#include <stdexcept>
#include <string>

namespace wellcheck {

/// Malformed instance documents, bad CLI arguments, unsupported families.
class InvalidInput : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A documented precondition of a library operation does not hold.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A constructed witness or certificate failed its own verification.
class VerificationFailure : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// The lattice oracle would exceed its candidate budget.
class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace wellcheck
