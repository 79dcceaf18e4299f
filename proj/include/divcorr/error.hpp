#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace divcorr {

// Invalid parameters or arguments outside an operation's domain.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// An exact-mode operation was handed a parameter with no exact representation.
class ModeError : public DomainError {
 public:
  using DomainError::DomainError;
};

// Allocation failures and sieve capacity overflows.
class ResourceError : public std::runtime_error {
 public:
  ResourceError(const std::string& what, std::uint64_t requested)
      : std::runtime_error(what + " (requested limit " + std::to_string(requested) + ")"),
        requested_(requested) {}

  std::uint64_t requested() const noexcept { return requested_; }

 private:
  std::uint64_t requested_;
};

// A self-check inside an algorithm failed. Indicates a bug, not bad input.
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace divcorr
