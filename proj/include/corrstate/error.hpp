#pragma once

#include <stdexcept>
#include <string>

namespace corrstate {

enum class ErrorKind {
  kOutOfRange,
  kInsufficientData,
  kConfigMismatch,
  kUnknownParameter,
  kLengthMismatch,
  kInvalidSpec,
  kParseError,
  kSchemaError,
  kEmptyData,
  kIoError,
  kInvalidReport,
  kRangeMismatch,
};

inline const char* error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kOutOfRange: return "OutOfRange";
    case ErrorKind::kInsufficientData: return "InsufficientData";
    case ErrorKind::kConfigMismatch: return "ConfigMismatch";
    case ErrorKind::kUnknownParameter: return "UnknownParameter";
    case ErrorKind::kLengthMismatch: return "LengthMismatch";
    case ErrorKind::kInvalidSpec: return "InvalidSpec";
    case ErrorKind::kParseError: return "ParseError";
    case ErrorKind::kSchemaError: return "SchemaError";
    case ErrorKind::kEmptyData: return "EmptyData";
    case ErrorKind::kIoError: return "IoError";
    case ErrorKind::kInvalidReport: return "InvalidReport";
    case ErrorKind::kRangeMismatch: return "RangeMismatch";
  }
  return "Error";
}

/// All recoverable failures (bad input data, bad configuration, bad files)
/// are reported as Error with a kind; anything else escaping the library is
/// a programming error.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(error_kind_name(kind)) + ": " + message),
        kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace corrstate
