#pragma once

#include <stdexcept>
#include <string>

namespace gdfl {

enum class ErrorKind {
  Parse,
  Schema,
  Validation,
  UnknownMedium,
  DuplicateNode,
  MissingColumn,
  InvalidSpec,
  InvalidArgs,
  Numeric,
  BadMagic,
  VersionMismatch,
  LengthMismatch,
  ShapeMismatch,
  TooFewUpdates,
  EmptyInput,
  MissingReport,
  Config,
  Io,
};

const char* to_string(ErrorKind kind);

/// Single exception type for the whole library; `kind()` tells callers
/// (and the C API) which contract was violated.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace gdfl
