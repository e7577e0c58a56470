#include "flowrl/error.hpp"

namespace flowrl {

std::string_view error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kCapacityExceeded: return "CapacityExceeded";
    case ErrorCode::kDuplicateRule: return "DuplicateRule";
    case ErrorCode::kInvalidProfile: return "InvalidProfile";
    case ErrorCode::kRulesetTooLarge: return "RulesetTooLarge";
    case ErrorCode::kZeroInitial: return "ZeroInitial";
    case ErrorCode::kNoLookups: return "NoLookups";
    case ErrorCode::kEmptyTrainingSets: return "EmptyTrainingSets";
    case ErrorCode::kInsufficientExperiences: return "InsufficientExperiences";
    case ErrorCode::kNonFiniteInput: return "NonFiniteInput";
    case ErrorCode::kCapacityNegative: return "CapacityNegative";
    case ErrorCode::kTooLarge: return "TooLarge";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kValidationError: return "ValidationError";
    case ErrorCode::kIoError: return "IoError";
  }
  return "Unknown";
}

std::string_view error_module(ErrorCode code) {
  switch (code) {
    case ErrorCode::kCapacityExceeded:
    case ErrorCode::kDuplicateRule:
      return "core-model";
    case ErrorCode::kInvalidProfile:
      return "traffic";
    case ErrorCode::kRulesetTooLarge:
    case ErrorCode::kZeroInitial:
    case ErrorCode::kNoLookups:
      return "simnet";
    case ErrorCode::kEmptyTrainingSets:
      return "agent-q";
    case ErrorCode::kInsufficientExperiences:
    case ErrorCode::kNonFiniteInput:
      return "agent-dqn";
    case ErrorCode::kCapacityNegative:
    case ErrorCode::kTooLarge:
      return "baselines";
    case ErrorCode::kParseError:
    case ErrorCode::kValidationError:
    case ErrorCode::kIoError:
      return "harness-cli";
  }
  return "unknown";
}

namespace {

std::string resolve_module(ErrorCode code, std::string_view module) {
  return std::string(module.empty() ? error_module(code) : module);
}

}  // namespace

Error::Error(ErrorCode code, const std::string& detail,
             std::string_view module)
    : std::runtime_error(resolve_module(code, module) + ": " +
                         std::string(error_name(code)) + ": " + detail),
      code_(code),
      module_(resolve_module(code, module)) {}

}  // namespace flowrl
