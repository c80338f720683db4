#pragma once

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "red/common.hpp"
#include "red/graph.hpp"
#include "red/runtime.hpp"

namespace red {

using CostMap = std::map<NodeId, Duration>;

/// Level shares D^(h) and absolute per-node sub-deadlines d_i.
struct DeadlineAssignment {
  std::vector<Duration> level_shares;
  std::map<NodeId, TimePoint> node_subdeadlines;
  CostMap basis_costs;
  /// Height of each covered node in the graph the assignment was computed on.
  std::map<NodeId, int> levels;

  [[nodiscard]] Duration total() const;
  friend bool operator==(const DeadlineAssignment&, const DeadlineAssignment&) = default;
};

/// D^(h) = budget * (level cost / total cost); d_i = origin + sum of shares up
/// to the node's height. Shares are floor(budget * prefix / total) differences
/// computed in exact integer arithmetic, so they always sum to the budget.
DeadlineAssignment proportional_assign(const DagSpec& dag, Duration budget, const CostMap& costs,
                                       TimePoint release_origin);

/// Nodes currently executing, with the time they have already run.
using RunningMap = std::map<NodeId, Duration>;

/// Re-applies the proportional rule to the not-yet-completed sub-DAG with the
/// remaining budget (budget - elapsed), anchored at arrival + elapsed. Running
/// nodes stay in the residual graph with their cost reduced by their elapsed
/// run time (floor 0).
DeadlineAssignment reassign_residual(const DagSpec& dag, const std::set<NodeId>& completed, Duration elapsed,
                                     Duration budget, const CostMap& costs, const RunningMap& running = {});

/// Same, with costs taken from the moving-average estimator (falling back to
/// each node's wcet).
DeadlineAssignment reassign_residual(const DagSpec& dag, const std::set<NodeId>& completed, Duration elapsed,
                                     Duration budget, const CostEstimator& observed,
                                     const RunningMap& running = {});

struct LevelCapacity {
  int level = 0;
  Duration work{};
  Duration bound{};
  bool graham_safe = false;
  bool paper_safe = false;

  friend bool operator==(const LevelCapacity&, const LevelCapacity&) = default;
};

struct CapacityReport {
  std::vector<LevelCapacity> per_level;

  [[nodiscard]] bool paper_safe() const;
  [[nodiscard]] bool graham_safe() const;
};

/// paper_safe: work/rho <= bound. graham_safe: work/rho + (1 - 1/rho) * max c
/// <= bound. rho may be +infinity.
CapacityReport capacity_check(const DagSpec& dag, const DeadlineAssignment& assignment, double rho);

/// Profiled contention delay keyed by (node key, platform name).
using ContentionTable = std::map<std::pair<std::string, std::string>, Duration>;

/// D_np = wcet + contention delay.
Duration atomic_deadline(const std::string& node_key, const NodeAttrs& node, const ContentionTable& table,
                         const std::string& platform);

/// Each node's wcet, the default cost basis.
CostMap wcet_costs(const DagSpec& dag);

}  // namespace red
