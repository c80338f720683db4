#include "red/deadlines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace red {

Duration DeadlineAssignment::total() const {
  return std::accumulate(level_shares.begin(), level_shares.end(), Duration::zero());
}

namespace {

using i128 = __int128;

DeadlineAssignment assign_on(const Topology& topo, Duration budget, const CostMap& costs, TimePoint origin) {
  DeadlineAssignment out;
  if (topo.size() == 0) return out;

  const auto levels = static_cast<std::size_t>(topo.max_height() + 1);
  std::vector<i128> level_cost(levels, 0);
  i128 total = 0;
  for (Topology::Index i = 0; i < topo.size(); ++i) {
    const auto& id = topo.id(i);
    auto it = costs.find(id);
    if (it == costs.end()) throw Error(ErrorCode::MissingCost, "no cost for node " + id);
    if (it->second < Duration::zero()) throw Error(ErrorCode::MissingCost, "negative cost for node " + id);
    out.basis_costs.emplace_hint(out.basis_costs.end(), id, it->second);
    out.levels.emplace_hint(out.levels.end(), id, topo.heights()[i]);
    level_cost[static_cast<std::size_t>(topo.heights()[i])] += it->second.count();
    total += it->second.count();
  }
  if (total == 0) throw Error(ErrorCode::ZeroTotalCost, "total cost of the DAG is zero");

  out.level_shares.resize(levels);
  std::vector<TimePoint> cumulative(levels);
  i128 prefix = 0;
  i128 prev = 0;
  for (std::size_t h = 0; h < levels; ++h) {
    prefix += level_cost[h];
    i128 cum = static_cast<i128>(budget.count()) * prefix / total;
    out.level_shares[h] = Duration{static_cast<std::int64_t>(cum - prev)};
    cumulative[h] = origin + Duration{static_cast<std::int64_t>(cum)};
    prev = cum;
  }
  for (Topology::Index i = 0; i < topo.size(); ++i) {
    out.node_subdeadlines.emplace_hint(out.node_subdeadlines.end(), topo.id(i),
                                       cumulative[static_cast<std::size_t>(topo.heights()[i])]);
  }
  return out;
}

}  // namespace

DeadlineAssignment proportional_assign(const DagSpec& dag, Duration budget, const CostMap& costs,
                                       TimePoint release_origin) {
  if (budget <= Duration::zero()) throw Error(ErrorCode::NonPositiveDeadline, "budget must be positive");
  Topology topo(dag);
  return assign_on(topo, budget, costs, release_origin);
}

DeadlineAssignment reassign_residual(const DagSpec& dag, const std::set<NodeId>& completed, Duration elapsed,
                                     Duration budget, const CostMap& costs, const RunningMap& running) {
  if (elapsed >= budget) {
    throw Error(ErrorCode::BudgetExhausted, "DAG '" + dag.id + "' has no budget left");
  }
  DagSpec residual;
  residual.id = dag.id;
  residual.deadline = budget - elapsed;
  residual.arrival = dag.arrival + elapsed;
  CostMap residual_costs;
  for (const auto& [id, attrs] : dag.nodes) {
    if (completed.count(id)) continue;
    residual.nodes.emplace_hint(residual.nodes.end(), id, attrs);
    auto it = costs.find(id);
    if (it == costs.end()) throw Error(ErrorCode::MissingCost, "no cost for node " + id);
    Duration c = it->second;
    if (auto r = running.find(id); r != running.end()) c = std::max(Duration::zero(), c - r->second);
    residual_costs.emplace_hint(residual_costs.end(), id, c);
  }
  if (residual.nodes.empty()) return {};
  for (const auto& e : dag.edges) {
    if (!completed.count(e.from) && !completed.count(e.to)) residual.edges.insert(e);
  }
  Topology topo(residual);
  return assign_on(topo, residual.deadline, residual_costs, residual.arrival);
}

DeadlineAssignment reassign_residual(const DagSpec& dag, const std::set<NodeId>& completed, Duration elapsed,
                                     Duration budget, const CostEstimator& observed, const RunningMap& running) {
  CostMap costs;
  for (const auto& [id, attrs] : dag.nodes) costs.emplace_hint(costs.end(), id, observed.estimate(id, attrs.wcet));
  return reassign_residual(dag, completed, elapsed, budget, costs, running);
}

bool CapacityReport::paper_safe() const {
  return std::all_of(per_level.begin(), per_level.end(), [](const auto& l) { return l.paper_safe; });
}

bool CapacityReport::graham_safe() const {
  return std::all_of(per_level.begin(), per_level.end(), [](const auto& l) { return l.graham_safe; });
}

CapacityReport capacity_check(const DagSpec& dag, const DeadlineAssignment& assignment, double rho) {
  (void)dag;
  CapacityReport report;
  const std::size_t levels = assignment.level_shares.size();
  std::vector<Duration> work(levels, Duration::zero()), max_cost(levels, Duration::zero());
  for (const auto& [id, cost] : assignment.basis_costs) {
    auto lv = assignment.levels.find(id);
    if (lv == assignment.levels.end()) continue;
    auto h = static_cast<std::size_t>(lv->second);
    work[h] += cost;
    max_cost[h] = std::max(max_cost[h], cost);
  }
  const double inv_rho = std::isinf(rho) ? 0.0 : 1.0 / rho;
  for (std::size_t h = 0; h < levels; ++h) {
    const double w = static_cast<double>(work[h].count());
    const double b = static_cast<double>(assignment.level_shares[h].count());
    const double m = static_cast<double>(max_cost[h].count());
    LevelCapacity lc;
    lc.level = static_cast<int>(h);
    lc.work = work[h];
    lc.bound = assignment.level_shares[h];
    lc.paper_safe = w * inv_rho <= b;
    lc.graham_safe = w * inv_rho + (1.0 - inv_rho) * m <= b;
    report.per_level.push_back(lc);
  }
  return report;
}

Duration atomic_deadline(const std::string& node_key, const NodeAttrs& node, const ContentionTable& table,
                         const std::string& platform) {
  if (node.kind != NodeKind::Atomic) throw Error(ErrorCode::NotAtomic, node_key + " is partitionable");
  auto it = table.find({node_key, platform});
  if (it == table.end()) throw Error(ErrorCode::NoProfile, node_key + " on " + platform);
  return node.wcet + it->second;
}

CostMap wcet_costs(const DagSpec& dag) {
  CostMap out;
  for (const auto& [id, attrs] : dag.nodes) out.emplace_hint(out.end(), id, attrs.wcet);
  return out;
}

}  // namespace red
