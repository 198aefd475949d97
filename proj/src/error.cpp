#include "backflow/error.hpp"

namespace backflow {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::SubdivisionLimit: return "SubdivisionLimit";
    case ErrorCode::NonFiniteEvaluation: return "NonFiniteEvaluation";
    case ErrorCode::NoBracket: return "NoBracket";
    case ErrorCode::Overflow: return "Overflow";
    case ErrorCode::DivergentTruncation: return "DivergentTruncation";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::ZeroState: return "ZeroState";
    case ErrorCode::SmallTimeInstability: return "SmallTimeInstability";
    case ErrorCode::ZeroProbability: return "ZeroProbability";
    case ErrorCode::NotBackflow: return "NotBackflow";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::InvariantViolation: return "InvariantViolation";
  }
  return "Unknown";
}

}  // namespace backflow
