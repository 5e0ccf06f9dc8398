#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace solgeom {

/// Base of every error thrown by the engine.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed expression text. `offset` is a byte offset into the source.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t offset)
      : Error(message + " at offset " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

/// Arithmetic outside a function's domain (log of a nonpositive value, 1/0, ...).
/// `offset` is the source offset of the offending expression node when known.
class DomainError : public Error {
 public:
  static constexpr std::size_t kNoOffset = static_cast<std::size_t>(-1);

  explicit DomainError(const std::string& message, std::size_t offset = kNoOffset)
      : Error(offset == kNoOffset ? message
                                  : message + " at offset " + std::to_string(offset)),
        offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

/// A derivative was requested that the configured jet order cannot supply.
class InsufficientOrder : public Error {
 public:
  InsufficientOrder(int required, int configured)
      : Error("insufficient jet order: required K >= " + std::to_string(required) +
              ", configured K = " + std::to_string(configured)),
        required_(required),
        configured_(configured) {}
  int required() const { return required_; }
  int configured() const { return configured_; }

 private:
  int required_;
  int configured_;
};

class DegenerateMetric : public Error {
 public:
  using Error::Error;
};

/// Invalid configuration or arguments (maps to CLI exit code 2).
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// A check was asked to run on data that does not satisfy its hypotheses.
/// Distinct from a check that ran and failed.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Normal equations the damping could not regularize.
class SingularSystem : public Error {
 public:
  using Error::Error;
};

}  // namespace solgeom
