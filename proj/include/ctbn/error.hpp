#pragma once

#include <stdexcept>
#include <string>

namespace ctbn {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on domain data was violated (bad state, invalid model,
/// non-disjoint node sets, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// The joint state space is larger than the configured cap.
class CapacityError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Unreadable or malformed input file.
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace ctbn
