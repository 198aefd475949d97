#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace backflow {

enum class ErrorCode {
  InvalidArgument,
  SubdivisionLimit,
  NonFiniteEvaluation,
  NoBracket,
  Overflow,
  DivergentTruncation,
  OutOfRange,
  ZeroState,
  SmallTimeInstability,
  ZeroProbability,
  NotBackflow,
  TooLarge,
  ParseError,
  InvariantViolation,
};

std::string_view to_string(ErrorCode code) noexcept;

// Single exception type for the library; callers switch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace backflow
