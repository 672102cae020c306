#pragma once

#include <stdexcept>
#include <string>

namespace lipent {

enum class ErrorCode {
  InvalidArgument,
  SizeLimitExceeded,
  SampleMismatch,
  NoPacking,
  FamilyTooLarge,
  BoundNotReached,
  GridMisaligned,
  EpsilonTooLarge,
  DimensionExceedsTruncation,
  ResolutionTooLow,
  ChannelMismatch,
  IncompatibleDepth,
  TargetTooSmall,
  OutOfRange,
  BudgetExceeded,
  ConfigError,
  IoError,
};

const char* to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& what);

inline void require(bool condition, ErrorCode code, const std::string& what) {
  if (!condition) fail(code, what);
}

}  // namespace lipent
