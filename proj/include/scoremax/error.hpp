#pragma once

#include <stdexcept>
#include <string>

namespace scoremax {

enum class ErrorCode {
  InvalidRate,
  LabelViolation,
  DriftViolation,
  InvalidPrior,
  InvalidCost,
  InvalidArgument,
  IndexOutOfRange,
  InvalidKink,
  EmptyMenu,
  DomainViolation,
  DimensionMismatch,
  InfeasibleCanonicalization,
  HorizonTooLarge,
  NumericalBreakdown,
  ConvergenceFailure,
  NotSingleSignal,
  ParseError,
  ValidationError,
  GridTooLarge,
  IoError,
};

const char* to_string(ErrorCode code) noexcept;

// Every failure raised by the library carries one of the codes above so the
// C API can map it onto a status value without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(to_string(code)) + ": " + detail),
        code_(code),
        detail_(detail) {}

  ErrorCode code() const noexcept { return code_; }
  // Message without the code prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace scoremax
