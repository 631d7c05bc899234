#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fluency {

enum class ErrorCode {
  EmptyAudio,
  BadAudio,
  BadConfig,
  InvalidInput,
  EmptyInput,
  BackendUnavailable,
  ResponseEmpty,
  MissingContext,
  ParseFailure,
  GenerationFailed,
  RefinementFailed,
  InvalidAction,
  MissingFeedback,
  InvalidState,
  NotFound,
  ChunkOutOfRange,
};

std::string_view to_string(ErrorCode code);

// Every failure surfaced by the library carries a machine-readable code and a
// short detail string (e.g. "channels=2", "schema_str", "modification limit").
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string detail);

  ErrorCode code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace fluency
