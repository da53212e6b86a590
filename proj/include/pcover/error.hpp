#pragma once

#include <stdexcept>
#include <string>

namespace pcover {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or out-of-contract input (bad probability, negative weight,
/// mismatched ground sets, unparsable JSON, ...).
class InputError : public Error {
 public:
  using Error::Error;
};

/// An enumeration guard refused to run because the instance is too large.
/// The guard name is part of the contract: the CLI reports it verbatim.
class GuardError : public Error {
 public:
  GuardError(std::string guard, const std::string& detail)
      : Error("guard '" + guard + "' exceeded: " + detail), guard_(std::move(guard)) {}

  const std::string& guard() const noexcept { return guard_; }

 private:
  std::string guard_;
};

/// A checked mathematical property failed at runtime.
class PropertyViolation : public Error {
 public:
  using Error::Error;
};

}  // namespace pcover
