#ifndef FLOWRL_ERROR_HPP_
#define FLOWRL_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace flowrl {

enum class ErrorCode {
  kCapacityExceeded,
  kDuplicateRule,
  kInvalidProfile,
  kRulesetTooLarge,
  kZeroInitial,
  kNoLookups,
  kEmptyTrainingSets,
  kInsufficientExperiences,
  kNonFiniteInput,
  kCapacityNegative,
  kTooLarge,
  kParseError,
  kValidationError,
  kIoError,
};

std::string_view error_name(ErrorCode code);
// Module that raises the given code, e.g. "core-model".
std::string_view error_module(ErrorCode code);

// All library failures are reported through this type. what() reads
// "<module>: <CodeName>: <detail>".
class Error : public std::runtime_error {
 public:
  // An empty module falls back to error_module(code).
  Error(ErrorCode code, const std::string& detail,
        std::string_view module = {});

  ErrorCode code() const { return code_; }
  const std::string& module() const { return module_; }

 private:
  ErrorCode code_;
  std::string module_;
};

}  // namespace flowrl

#endif  // FLOWRL_ERROR_HPP_
