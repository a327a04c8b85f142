#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace obg {

enum class ErrorCode {
  kCapacityExceeded,
  kOMUnavailable,
  kOMTooSmall,
  kSizeMismatch,
  kBlockOverflow,
  kMalformedBlock,
  kParamMismatch,
  kUnknownSource,
  kSymmetryRequired,
  kObliviousnessViolation,
  kInvalidArgument,
  kIo,
};

std::string_view to_string(ErrorCode code);

// Every failure in the library surfaces as this type; `code()` identifies
// which contract was violated.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code),
        detail_(what) {}

  ErrorCode code() const noexcept { return code_; }
  // The message without the code prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace obg
