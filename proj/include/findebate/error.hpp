#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace findebate {

enum class ErrorCode {
  kEmptyInput,
  kBackendUnavailable,
  kResponseEmpty,
  kBatchTooLarge,
  kDimMismatch,
  kDuplicateId,
  kEmptyIndex,
  kIoFailure,
  kFormatVersionMismatch,
  kEmptyBundle,
  kMissingPlaceholder,
  kAgentFailed,
  kPreconditionViolation,
  kUnparseableVerdict,
  kMissingMode,
  kInvalidConfig,
};

std::string_view error_code_name(ErrorCode code);

// Every library failure surfaces as this type; the code identifies the contract
// that was violated, the message carries the human-readable detail.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace findebate
