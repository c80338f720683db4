#include "red/common.hpp"

namespace red {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::CycleDetected: return "CycleDetected";
    case ErrorCode::DanglingEdge: return "DanglingEdge";
    case ErrorCode::NonPositiveDeadline: return "NonPositiveDeadline";
    case ErrorCode::EmptyDag: return "EmptyDag";
    case ErrorCode::InvalidNode: return "InvalidNode";
    case ErrorCode::MutationBreaksInvariant: return "MutationBreaksInvariant";
    case ErrorCode::ZeroTotalCost: return "ZeroTotalCost";
    case ErrorCode::MissingCost: return "MissingCost";
    case ErrorCode::BudgetExhausted: return "BudgetExhausted";
    case ErrorCode::NotAtomic: return "NotAtomic";
    case ErrorCode::NoProfile: return "NoProfile";
    case ErrorCode::NodeNotFound: return "NodeNotFound";
    case ErrorCode::NotRefinable: return "NotRefinable";
    case ErrorCode::IllegalTransition: return "IllegalTransition";
    case ErrorCode::NonPositiveObservation: return "NonPositiveObservation";
    case ErrorCode::NonPositiveDeadlineSpan: return "NonPositiveDeadlineSpan";
    case ErrorCode::InvalidWorkload: return "InvalidWorkload";
    case ErrorCode::HorizonExceeded: return "HorizonExceeded";
    case ErrorCode::IncompleteTrace: return "IncompleteTrace";
    case ErrorCode::MismatchedExperiment: return "MismatchedExperiment";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ValidationError: return "ValidationError";
    case ErrorCode::UnknownScenario: return "UnknownScenario";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

namespace {

std::string describe_cycle(const std::vector<NodeId>& witness) {
  std::string out = "cycle ";
  for (std::size_t i = 0; i < witness.size(); ++i) {
    if (i > 0) out += " -> ";
    out += witness[i];
  }
  return out;
}

}  // namespace

CycleError::CycleError(std::vector<NodeId> witness)
    : Error(ErrorCode::CycleDetected, describe_cycle(witness)), witness_(std::move(witness)) {}

}  // namespace red
