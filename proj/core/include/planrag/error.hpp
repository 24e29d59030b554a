#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace planrag {

enum class ErrorCode {
  kInvalidArgument,
  kBackendUnavailable,
  kPromptTooLong,
  kEmptyResponse,
  kCacheIo,
  kMissingBinding,
  kUnknownTemplate,
  kNoParagraphs,
  kEmptyEvidence,
  kEmptyInput,
  kFileNotFound,
  kParseError,
  kInvalidParams,
  kConfigInvalid,
};

/// Stable upper-case name used in logs and error files, e.g. "EMPTY_EVIDENCE".
std::string_view error_code_name(ErrorCode code);

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace planrag
