#pragma once

#include <stdexcept>
#include <string>

namespace nspbound {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Malformed call: empty input, bad counts, inconsistent options.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// (rho, delta) maps to integers violating 0 < s < n < p.
class DegenerateDiscretization : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Input/output failure (unreadable or unwritable file, parse error).
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace nspbound
