#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dynkc {

/// Base class of every error thrown by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller passed a malformed or out-of-range argument.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// An identifier (point, node) is unknown to the queried structure.
class LookupError : public Error {
 public:
  using Error::Error;
};

/// The requested operation is inconsistent with the current state,
/// e.g. inserting a point that is already active.
class StateError : public Error {
 public:
  using Error::Error;
};

/// A documented operation precondition does not hold for the given input.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// A computation would exceed its configured resource budget.
class ResourceError : public Error {
 public:
  using Error::Error;
};

/// Stream generation was asked for parameters that cannot be satisfied.
class GenerationError : public Error {
 public:
  using Error::Error;
};

/// A serialized stream is malformed. Carries the 1-based line number.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& message)
      : Error("line " + std::to_string(line) + ": " + message), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace dynkc
