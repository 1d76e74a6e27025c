#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace senti {

enum class ErrorCode {
  MissingFile,
  MalformedRow,
  UnknownLabel,
  DuplicateId,
  FractionOutOfRange,
  CorpusTooSmall,
  EmptySweep,
  EmptyStopwordList,
  EmptyCorpus,
  UnknownTerm,
  MissingClass,
  KTooLarge,
  NonFiniteLoss,
  UnknownMethod,
  InvalidConfig,
  LengthMismatch,
  Empty,
  IoError,
  ModelFormat,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MissingFile: return "MissingFile";
    case ErrorCode::MalformedRow: return "MalformedRow";
    case ErrorCode::UnknownLabel: return "UnknownLabel";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::FractionOutOfRange: return "FractionOutOfRange";
    case ErrorCode::CorpusTooSmall: return "CorpusTooSmall";
    case ErrorCode::EmptySweep: return "EmptySweep";
    case ErrorCode::EmptyStopwordList: return "EmptyStopwordList";
    case ErrorCode::EmptyCorpus: return "EmptyCorpus";
    case ErrorCode::UnknownTerm: return "UnknownTerm";
    case ErrorCode::MissingClass: return "MissingClass";
    case ErrorCode::KTooLarge: return "KTooLarge";
    case ErrorCode::NonFiniteLoss: return "NonFiniteLoss";
    case ErrorCode::UnknownMethod: return "UnknownMethod";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::Empty: return "Empty";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::ModelFormat: return "ModelFormat";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above, so
/// callers (the CLI in particular) can map failures to exit statuses.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace senti
