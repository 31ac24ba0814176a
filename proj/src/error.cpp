#include "fgsym/error.hpp"

namespace fgsym {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kNonPositivePotential: return "NonPositivePotential";
    case ErrorCode::kUnknownRv: return "UnknownRv";
    case ErrorCode::kIndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::kNotAPermutation: return "NotAPermutation";
    case ErrorCode::kStateSpaceTooLarge: return "StateSpaceTooLarge";
    case ErrorCode::kRvMismatch: return "RvMismatch";
    case ErrorCode::kArityMismatch: return "ArityMismatch";
    case ErrorCode::kRangeMismatch: return "RangeMismatch";
    case ErrorCode::kUnknownBucket: return "UnknownBucket";
    case ErrorCode::kMultisetMismatch: return "MultisetMismatch";
    case ErrorCode::kInvalidEvidence: return "InvalidEvidence";
    case ErrorCode::kInvalidRange: return "InvalidRange";
    case ErrorCode::kDuplicateName: return "DuplicateName";
    case ErrorCode::kArityTooLarge: return "ArityTooLarge";
    case ErrorCode::kDegenerateInstance: return "DegenerateInstance";
    case ErrorCode::kBudgetExhausted: return "BudgetExhausted";
    case ErrorCode::kParse: return "Parse";
    case ErrorCode::kIo: return "Io";
    case ErrorCode::kInvalidConfig: return "InvalidConfig";
  }
  return "Unknown";
}

}  // namespace fgsym
