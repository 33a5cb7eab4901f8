#include "hublab/error.hpp"

namespace hublab {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::TokenCount: return "TokenCount";
    case ErrorCode::NegativeFlow: return "NegativeFlow";
    case ErrorCode::NonNumericToken: return "NonNumericToken";
    case ErrorCode::ParameterRange: return "ParameterRange";
    case ErrorCode::IndexRange: return "IndexRange";
    case ErrorCode::InvalidInstance: return "InvalidInstance";
    case ErrorCode::InfeasibleAllocation: return "InfeasibleAllocation";
    case ErrorCode::BudgetExceeded: return "BudgetExceeded";
    case ErrorCode::RequiresSingleOriginAllocation:
      return "RequiresSingleOriginAllocation";
    case ErrorCode::RequiresIdenticalSets: return "RequiresIdenticalSets";
    case ErrorCode::InvalidProgram: return "InvalidProgram";
    case ErrorCode::NumericalBreakdown: return "NumericalBreakdown";
    case ErrorCode::Unbalanced: return "Unbalanced";
    case ErrorCode::EmptyProblem: return "EmptyProblem";
    case ErrorCode::NegativeMass: return "NegativeMass";
    case ErrorCode::RequiresDisaggregatedCosts:
      return "RequiresDisaggregatedCosts";
    case ErrorCode::FractionalSolution: return "FractionalSolution";
    case ErrorCode::ObjectiveMismatch: return "ObjectiveMismatch";
    case ErrorCode::MalformedReport: return "MalformedReport";
  }
  return "Unknown";
}

}  // namespace hublab
