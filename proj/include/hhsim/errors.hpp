#pragma once

#include <stdexcept>
#include <string>

namespace hhsim {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Violated precondition on a value (negative age, bad enum token, ...).
class DomainError : public Error {
public:
  using Error::Error;
};

/// Malformed input file. Message carries file / row / column context.
class IngestError : public Error {
public:
  using Error::Error;
  IngestError(const std::string& file, std::size_t row, const std::string& detail)
      : Error(file + ":" + std::to_string(row) + ": " + detail) {}
};

/// Bad run configuration (unknown grouping key, missing table, scope misuse).
class ConfigError : public Error {
public:
  using Error::Error;
};

/// A runtime invariant the engine guarantees was found broken.
class InvariantError : public Error {
public:
  using Error::Error;
};

/// Result of a computation that has no defined value (MAPE with empty
/// series, correlation of a constant vector).
class UndefinedResultError : public Error {
public:
  using Error::Error;
};

}  // namespace hhsim
