#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fm {

// Every failure in the library is an Error carrying one of these codes.
// The C API and the CLI map codes to status values / exit codes, so new
// codes must be added to those tables as well.
enum class ErrorCode {
  InvalidArgument,
  DimensionMismatch,
  NonPositiveValuation,
  NonPositiveBudget,
  NonPositiveSupply,
  InvalidGroupLabel,
  UnboundedDemand,
  NotConverged,
  ZeroUtility,
  ZeroDemandUtility,
  ZeroReferenceWelfare,
  OracleScaleExceeded,
  LpInfeasible,
  EmptySample,
  UnbalancedGroups,
  InvalidMatching,
  EmptyGroup,
  DegenerateAllocation,
  WrongOrientation,
  BracketFailure,
  ParseError,
  DuplicateRating,
  EmptyDataset,
  IndexOutOfRange,
  OddN,
  DegenerateSplit,
  BoundViolation,
  ScenarioDegenerate,
};

inline const char* error_code_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NonPositiveValuation: return "NonPositiveValuation";
    case ErrorCode::NonPositiveBudget: return "NonPositiveBudget";
    case ErrorCode::NonPositiveSupply: return "NonPositiveSupply";
    case ErrorCode::InvalidGroupLabel: return "InvalidGroupLabel";
    case ErrorCode::UnboundedDemand: return "UnboundedDemand";
    case ErrorCode::NotConverged: return "NotConverged";
    case ErrorCode::ZeroUtility: return "ZeroUtility";
    case ErrorCode::ZeroDemandUtility: return "ZeroDemandUtility";
    case ErrorCode::ZeroReferenceWelfare: return "ZeroReferenceWelfare";
    case ErrorCode::OracleScaleExceeded: return "OracleScaleExceeded";
    case ErrorCode::LpInfeasible: return "LpInfeasible";
    case ErrorCode::EmptySample: return "EmptySample";
    case ErrorCode::UnbalancedGroups: return "UnbalancedGroups";
    case ErrorCode::InvalidMatching: return "InvalidMatching";
    case ErrorCode::EmptyGroup: return "EmptyGroup";
    case ErrorCode::DegenerateAllocation: return "DegenerateAllocation";
    case ErrorCode::WrongOrientation: return "WrongOrientation";
    case ErrorCode::BracketFailure: return "BracketFailure";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::DuplicateRating: return "DuplicateRating";
    case ErrorCode::EmptyDataset: return "EmptyDataset";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::OddN: return "OddN";
    case ErrorCode::DegenerateSplit: return "DegenerateSplit";
    case ErrorCode::BoundViolation: return "BoundViolation";
    case ErrorCode::ScenarioDegenerate: return "ScenarioDegenerate";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// Carries the solver state that existed when iteration gave up.
class NotConvergedError : public Error {
 public:
  NotConvergedError(const std::string& message, double max_residual,
                    std::size_t iterations)
      : Error(ErrorCode::NotConverged, message),
        max_residual_(max_residual),
        iterations_(iterations) {}
  double max_residual() const { return max_residual_; }
  std::size_t iterations() const { return iterations_; }

 private:
  double max_residual_;
  std::size_t iterations_;
};

class BoundViolationError : public Error {
 public:
  BoundViolationError(const std::string& message, std::size_t item, double excess)
      : Error(ErrorCode::BoundViolation, message), item_(item), excess_(excess) {}
  std::size_t item() const { return item_; }
  double excess() const { return excess_; }

 private:
  std::size_t item_;
  double excess_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace fm
