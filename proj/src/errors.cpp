#include "lipent/errors.hpp"

namespace lipent {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::SizeLimitExceeded: return "SizeLimitExceeded";
    case ErrorCode::SampleMismatch: return "SampleMismatch";
    case ErrorCode::NoPacking: return "NoPacking";
    case ErrorCode::FamilyTooLarge: return "FamilyTooLarge";
    case ErrorCode::BoundNotReached: return "BoundNotReached";
    case ErrorCode::GridMisaligned: return "GridMisaligned";
    case ErrorCode::EpsilonTooLarge: return "EpsilonTooLarge";
    case ErrorCode::DimensionExceedsTruncation: return "DimensionExceedsTruncation";
    case ErrorCode::ResolutionTooLow: return "ResolutionTooLow";
    case ErrorCode::ChannelMismatch: return "ChannelMismatch";
    case ErrorCode::IncompatibleDepth: return "IncompatibleDepth";
    case ErrorCode::TargetTooSmall: return "TargetTooSmall";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::BudgetExceeded: return "BudgetExceeded";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace lipent
