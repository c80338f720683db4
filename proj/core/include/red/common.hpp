#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace red {

/// All simulated time is integer nanoseconds.
using Duration = std::chrono::nanoseconds;
/// Absolute simulated time, measured from the start of a run.
using TimePoint = std::chrono::nanoseconds;

using NodeId = std::string;
using DagId = std::string;

inline Duration from_ms(double ms) { return Duration{std::llround(ms * 1e6)}; }
inline Duration from_seconds(double s) { return Duration{std::llround(s * 1e9)}; }
inline double to_ms(Duration d) { return static_cast<double>(d.count()) / 1e6; }
inline double to_seconds(Duration d) { return static_cast<double>(d.count()) / 1e9; }

enum class ErrorCode {
  CycleDetected,
  DanglingEdge,
  NonPositiveDeadline,
  EmptyDag,
  InvalidNode,
  MutationBreaksInvariant,
  ZeroTotalCost,
  MissingCost,
  BudgetExhausted,
  NotAtomic,
  NoProfile,
  NodeNotFound,
  NotRefinable,
  IllegalTransition,
  NonPositiveObservation,
  NonPositiveDeadlineSpan,
  InvalidWorkload,
  HorizonExceeded,
  IncompleteTrace,
  MismatchedExperiment,
  ParseError,
  ValidationError,
  UnknownScenario,
  IoError,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Raised by validation when the edge set contains a cycle. The witness is a
/// closed walk: its first and last entries name the same node.
class CycleError : public Error {
 public:
  explicit CycleError(std::vector<NodeId> witness);

  [[nodiscard]] const std::vector<NodeId>& witness() const noexcept { return witness_; }

 private:
  std::vector<NodeId> witness_;
};

}  // namespace red
