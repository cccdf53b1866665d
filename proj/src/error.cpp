#include "scoremax/error.hpp"

namespace scoremax {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidRate: return "InvalidRate";
    case ErrorCode::LabelViolation: return "LabelViolation";
    case ErrorCode::DriftViolation: return "DriftViolation";
    case ErrorCode::InvalidPrior: return "InvalidPrior";
    case ErrorCode::InvalidCost: return "InvalidCost";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::InvalidKink: return "InvalidKink";
    case ErrorCode::EmptyMenu: return "EmptyMenu";
    case ErrorCode::DomainViolation: return "DomainViolation";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::InfeasibleCanonicalization: return "InfeasibleCanonicalization";
    case ErrorCode::HorizonTooLarge: return "HorizonTooLarge";
    case ErrorCode::NumericalBreakdown: return "NumericalBreakdown";
    case ErrorCode::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorCode::NotSingleSignal: return "NotSingleSignal";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ValidationError: return "ValidationError";
    case ErrorCode::GridTooLarge: return "GridTooLarge";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace scoremax
