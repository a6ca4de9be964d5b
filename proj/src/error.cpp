#include "gdfl/error.hpp"

namespace gdfl {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Parse: return "ParseError";
    case ErrorKind::Schema: return "SchemaError";
    case ErrorKind::Validation: return "ValidationError";
    case ErrorKind::UnknownMedium: return "UnknownMedium";
    case ErrorKind::DuplicateNode: return "DuplicateNode";
    case ErrorKind::MissingColumn: return "MissingColumn";
    case ErrorKind::InvalidSpec: return "InvalidSpec";
    case ErrorKind::InvalidArgs: return "InvalidArgs";
    case ErrorKind::Numeric: return "NumericError";
    case ErrorKind::BadMagic: return "BadMagic";
    case ErrorKind::VersionMismatch: return "VersionMismatch";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::TooFewUpdates: return "TooFewUpdates";
    case ErrorKind::EmptyInput: return "EmptyInput";
    case ErrorKind::MissingReport: return "MissingReport";
    case ErrorKind::Config: return "ConfigError";
    case ErrorKind::Io: return "IoError";
  }
  return "Error";
}

}  // namespace gdfl
