#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fgsym {

enum class ErrorCode {
  kLengthMismatch,
  kNonPositivePotential,
  kUnknownRv,
  kIndexOutOfRange,
  kNotAPermutation,
  kStateSpaceTooLarge,
  kRvMismatch,
  kArityMismatch,
  kRangeMismatch,
  kUnknownBucket,
  kMultisetMismatch,
  kInvalidEvidence,
  kInvalidRange,
  kDuplicateName,
  kArityTooLarge,
  kDegenerateInstance,
  kBudgetExhausted,
  kParse,
  kIo,
  kInvalidConfig,
};

std::string_view to_string(ErrorCode code);

// Every failure raised by the library carries one of the codes above so
// callers (and the CLI exit-code mapping) can branch without parsing text.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace fgsym
