#pragma once

#include <string>
#include <utility>
#include <vector>

#include "red/common.hpp"
#include "red/graph.hpp"

namespace red {

/// A MIMONet stage split into one shared encoder and q decoders.
struct RefinedStage {
  NodeId origin;
  NodeId encoder;
  Duration encoder_cost{};
  std::vector<std::pair<NodeId, Duration>> decoders;

  [[nodiscard]] std::size_t q() const noexcept { return decoders.size(); }
  friend bool operator==(const RefinedStage&, const RefinedStage&) = default;
};

NodeId encoder_node_id(const NodeId& stage);
NodeId decoder_node_id(const NodeId& stage, std::size_t j);

/// Describes how stage would be split. Throws NotRefinable.
RefinedStage refined_stage(const DagSpec& dag, const NodeId& stage);

/// Replaces stage by <stage>.enc (SharedEncoder) followed by <stage>.dec<j>
/// (Decoder). Predecessors feed the encoder; successors hang off every
/// decoder. Throws NotRefinable.
DagSpec refine(const DagSpec& dag, const NodeId& stage);

/// Refines every refinable stage.
DagSpec refine_all(const DagSpec& dag);

/// Extra critical-path cost when the decoders cannot all run at once: zero
/// for rho >= q, otherwise the LPT makespan on floor(rho) slots minus the
/// largest decoder, capped at sum - max.
Duration serialization_margin(const RefinedStage& stage, double rho);

/// One frontier sub-task as seen by DynamicMerge.
struct FrontierItem {
  std::string id;
  /// Physical encoder weights; empty for sub-tasks that are not shared
  /// encoders.
  std::string encoder;
  int height = 0;
  TimePoint predicted_release{};
  TimePoint subdeadline{};

  friend bool operator==(const FrontierItem&, const FrontierItem&) = default;
};

struct MergeUnit {
  std::vector<std::string> members;
  std::string shared_encoder;
  TimePoint unit_deadline{};
  int encoder_executions = 0;

  friend bool operator==(const MergeUnit&, const MergeUnit&) = default;
};

/// Groups shared-encoder items with the same encoder and height whose
/// predicted releases fall within gamma of the group's earliest member.
/// Everything else becomes a singleton. Units are ordered by (deadline, first
/// member).
std::vector<MergeUnit> dynamic_merge(std::vector<FrontierItem> frontier, Duration gamma);

}  // namespace red
