#include "red/workload.hpp"

#include <algorithm>
#include <set>

namespace red {

std::vector<TimePoint> DagTemplate::releases() const {
  if (!arrivals.empty()) {
    auto out = arrivals;
    std::sort(out.begin(), out.end());
    return out;
  }
  if (!period) return {dag.arrival};
  std::vector<TimePoint> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) out.push_back(dag.arrival + static_cast<std::int64_t>(k) * *period);
  return out;
}

void validate(const SchedulerConfig& cfg) {
  if (cfg.gamma < Duration::zero()) throw Error(ErrorCode::ValidationError, "scheduler.gamma must be >= 0");
  if (cfg.k < 1) throw Error(ErrorCode::ValidationError, "scheduler.k must be >= 1");
  if (cfg.barrier_overhead < Duration::zero()) {
    throw Error(ErrorCode::ValidationError, "scheduler.barrier_overhead must be >= 0");
  }
  if (!(cfg.high_criticality >= 0.0 && cfg.high_criticality <= 1.0)) {
    throw Error(ErrorCode::ValidationError, "scheduler.high_criticality must be in [0, 1]");
  }
  if (cfg.horizon && *cfg.horizon <= Duration::zero()) {
    throw Error(ErrorCode::ValidationError, "scheduler.horizon must be positive");
  }
  validate(cfg.burst);
}

const DagTemplate* Workload::find(const DagId& id) const {
  for (const auto& t : dags) {
    if (t.dag.id == id) return &t;
  }
  return nullptr;
}

std::string node_key(const DagId& dag, const NodeId& node) { return dag + "/" + node; }

void validate(const Workload& w) {
  auto fail = [](const std::string& where, const std::string& why) {
    throw Error(ErrorCode::InvalidWorkload, where + ": " + why);
  };
  auto wrap = [&](const std::string& where, auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      fail(where, e.what());
    }
  };
  if (w.version != 1) fail("version", "unsupported version " + std::to_string(w.version));
  wrap("platform", [&] { validate(w.platform); });
  wrap("exec", [&] { validate(w.exec); });
  wrap("scheduler", [&] { validate(w.scheduler); });

  std::set<DagId> ids;
  for (std::size_t i = 0; i < w.dags.size(); ++i) {
    const auto& t = w.dags[i];
    const std::string where = "dags[" + std::to_string(i) + "]";
    if (t.dag.id.empty() || t.dag.id.find_first_of("#/\t ") != std::string::npos) {
      fail(where, "DAG id must be non-empty without '#', '/' or whitespace");
    }
    if (!ids.insert(t.dag.id).second) fail(where, "duplicate DAG id " + t.dag.id);
    wrap(where, [&] { validate(t.dag); });
    if (t.period && *t.period <= Duration::zero()) fail(where, "period must be positive");
    if (t.count < 1) fail(where, "count must be >= 1");
    if (t.dag.arrival < TimePoint::zero()) fail(where, "arrival must be >= 0");
    for (auto a : t.arrivals) {
      if (a < TimePoint::zero()) fail(where, "arrivals must be >= 0");
    }
  }
  for (std::size_t i = 0; i < w.mutations.size(); ++i) {
    const auto& m = w.mutations[i];
    const std::string where = "mutations[" + std::to_string(i) + "]";
    if (!ids.count(m.target_dag)) fail(where, "unknown target DAG " + m.target_dag);
    if (m.at < TimePoint::zero()) fail(where, "time must be >= 0");
  }
  for (std::size_t i = 0; i < w.interference.size(); ++i) {
    wrap("interference[" + std::to_string(i) + "]", [&] { validate(w.interference[i]); });
  }
  for (const auto& [key, delta] : w.contention) {
    if (delta < Duration::zero()) fail("contention", key.first + " has negative delay");
  }
  for (std::size_t i = 0; i < w.cross.size(); ++i) {
    const auto& c = w.cross[i];
    const std::string where = "cross[" + std::to_string(i) + "]";
    const auto* from = w.find(c.from_dag);
    const auto* to = w.find(c.to_dag);
    if (!from || !to) fail(where, "unknown DAG");
    if (c.from_dag == c.to_dag) fail(where, "cross dependency must link two different DAGs");
    if (!from->dag.nodes.count(c.from_node)) fail(where, "unknown node " + c.from_node);
    if (!to->dag.nodes.count(c.to_node)) fail(where, "unknown node " + c.to_node);
  }
}

}  // namespace red
