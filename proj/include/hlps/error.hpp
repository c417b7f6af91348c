#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hlps {

enum class ErrorCode {
  kEmptyPointSet,
  kInsufficientPoints,
  kBadNoiseConfig,
  kNoParticipants,
  kDuplicateSender,
  kQuNotInGroup,
  kNotAProbabilityVector,
  kBadAnonymitySetSize,
  kBadScenarioParams,
  kBadTimingParams,
  kInvalidValue,
  kConfigSyntax,
  kConfigInvalid,
  kIo,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kEmptyPointSet: return "EmptyPointSet";
    case ErrorCode::kInsufficientPoints: return "InsufficientPoints";
    case ErrorCode::kBadNoiseConfig: return "BadNoiseConfig";
    case ErrorCode::kNoParticipants: return "NoParticipants";
    case ErrorCode::kDuplicateSender: return "DuplicateSender";
    case ErrorCode::kQuNotInGroup: return "QuNotInGroup";
    case ErrorCode::kNotAProbabilityVector: return "NotAProbabilityVector";
    case ErrorCode::kBadAnonymitySetSize: return "BadAnonymitySetSize";
    case ErrorCode::kBadScenarioParams: return "BadScenarioParams";
    case ErrorCode::kBadTimingParams: return "BadTimingParams";
    case ErrorCode::kInvalidValue: return "InvalidValue";
    case ErrorCode::kConfigSyntax: return "ConfigSyntax";
    case ErrorCode::kConfigInvalid: return "ConfigInvalid";
    case ErrorCode::kIo: return "Io";
  }
  return "Unknown";
}

// Every library failure is reported as an Error carrying a machine-readable
// code; the message is for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace hlps
