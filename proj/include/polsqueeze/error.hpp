#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace polsq {

enum class ErrorCode {
  InvalidParams,
  NonPurifiable,
  IndexOutOfRange,
  OddOrder,
  OrderTooLarge,
  CutoffTooSmall,
  DimensionTooLarge,
  TooFewPhotons,
  UnsupportedThermal,
  NotAState,
  NonNormalizedSetting,
  NotReachable,
  InvalidShotCount,
  IncompleteSchedule,
  PrecisionExhausted,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::NonPurifiable: return "NonPurifiable";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::OddOrder: return "OddOrder";
    case ErrorCode::OrderTooLarge: return "OrderTooLarge";
    case ErrorCode::CutoffTooSmall: return "CutoffTooSmall";
    case ErrorCode::DimensionTooLarge: return "DimensionTooLarge";
    case ErrorCode::TooFewPhotons: return "TooFewPhotons";
    case ErrorCode::UnsupportedThermal: return "UnsupportedThermal";
    case ErrorCode::NotAState: return "NotAState";
    case ErrorCode::NonNormalizedSetting: return "NonNormalizedSetting";
    case ErrorCode::NotReachable: return "NotReachable";
    case ErrorCode::InvalidShotCount: return "InvalidShotCount";
    case ErrorCode::IncompleteSchedule: return "IncompleteSchedule";
    case ErrorCode::PrecisionExhausted: return "PrecisionExhausted";
  }
  return "Unknown";
}

/// Single exception type for all numeric-domain failures; `code()` says which.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace polsq
