#include "fluency/core/error.hpp"

namespace fluency {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::EmptyAudio: return "EmptyAudio";
    case ErrorCode::BadAudio: return "BadAudio";
    case ErrorCode::BadConfig: return "BadConfig";
    case ErrorCode::InvalidInput: return "InvalidInput";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::BackendUnavailable: return "BackendUnavailable";
    case ErrorCode::ResponseEmpty: return "ResponseEmpty";
    case ErrorCode::MissingContext: return "MissingContext";
    case ErrorCode::ParseFailure: return "ParseFailure";
    case ErrorCode::GenerationFailed: return "GenerationFailed";
    case ErrorCode::RefinementFailed: return "RefinementFailed";
    case ErrorCode::InvalidAction: return "InvalidAction";
    case ErrorCode::MissingFeedback: return "MissingFeedback";
    case ErrorCode::InvalidState: return "InvalidState";
    case ErrorCode::NotFound: return "NotFound";
    case ErrorCode::ChunkOutOfRange: return "ChunkOutOfRange";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, std::string detail)
    : std::runtime_error(std::string(to_string(code)) +
                         (detail.empty() ? "" : ": " + detail)),
      code_(code),
      detail_(std::move(detail)) {}

}  // namespace fluency
