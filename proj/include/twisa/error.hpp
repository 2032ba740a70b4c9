#pragma once

#include <stdexcept>
#include <string>

namespace twisa {

enum class ErrorKind {
  Malformed,
  MissingField,
  Timestamp,
  Conflict,
  EmptyPolarity,
  Format,
  EmptyCorpus,
  Overparameterized,
  OutOfRange,
  DanglingEntry,
  NoData,
  EmptyDay,
  Io,
  Validation,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Malformed: return "malformed";
    case ErrorKind::MissingField: return "missing-field";
    case ErrorKind::Timestamp: return "timestamp";
    case ErrorKind::Conflict: return "conflict";
    case ErrorKind::EmptyPolarity: return "empty-polarity";
    case ErrorKind::Format: return "format";
    case ErrorKind::EmptyCorpus: return "empty-corpus";
    case ErrorKind::Overparameterized: return "overparameterized";
    case ErrorKind::OutOfRange: return "out-of-range";
    case ErrorKind::DanglingEntry: return "dangling-entry";
    case ErrorKind::NoData: return "no-data";
    case ErrorKind::EmptyDay: return "empty-day";
    case ErrorKind::Io: return "io";
    case ErrorKind::Validation: return "validation";
  }
  return "unknown";
}

/// Every failure raised by the library. `kind()` is stable and meant for
/// dispatch; `what()` is for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// A record-level failure with the 1-based line it came from.
class RecordError : public Error {
 public:
  RecordError(ErrorKind kind, std::size_t line, const std::string& message)
      : Error(kind, "line " + std::to_string(line) + ": " + message), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace twisa
