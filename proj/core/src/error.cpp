#include "planrag/error.hpp"

namespace planrag {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "INVALID_ARGUMENT";
    case ErrorCode::kBackendUnavailable: return "BACKEND_UNAVAILABLE";
    case ErrorCode::kPromptTooLong: return "PROMPT_TOO_LONG";
    case ErrorCode::kEmptyResponse: return "EMPTY_RESPONSE";
    case ErrorCode::kCacheIo: return "CACHE_IO";
    case ErrorCode::kMissingBinding: return "MISSING_BINDING";
    case ErrorCode::kUnknownTemplate: return "UNKNOWN_TEMPLATE";
    case ErrorCode::kNoParagraphs: return "NO_PARAGRAPHS";
    case ErrorCode::kEmptyEvidence: return "EMPTY_EVIDENCE";
    case ErrorCode::kEmptyInput: return "EMPTY_INPUT";
    case ErrorCode::kFileNotFound: return "FILE_NOT_FOUND";
    case ErrorCode::kParseError: return "PARSE_ERROR";
    case ErrorCode::kInvalidParams: return "INVALID_PARAMS";
    case ErrorCode::kConfigInvalid: return "CONFIG_INVALID";
  }
  return "UNKNOWN";
}

}  // namespace planrag
