#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "red/common.hpp"
#include "red/deadlines.hpp"
#include "red/graph.hpp"
#include "red/overload.hpp"
#include "red/platform.hpp"

namespace red {

/// A DAG released one or more times. Releases come from the explicit arrival
/// list when present, otherwise from dag.arrival + k * period for k < count.
struct DagTemplate {
  DagSpec dag;
  std::optional<Duration> period;
  std::size_t count = 1;
  std::vector<TimePoint> arrivals;

  [[nodiscard]] std::vector<TimePoint> releases() const;
  friend bool operator==(const DagTemplate&, const DagTemplate&) = default;
};

/// to_node of every to_dag instance waits for from_node of the latest
/// from_dag instance released at or before it.
struct CrossDependency {
  DagId from_dag;
  NodeId from_node;
  DagId to_dag;
  NodeId to_node;

  friend bool operator==(const CrossDependency&, const CrossDependency&) = default;
};

struct SchedulerConfig {
  Duration gamma = from_ms(100);
  std::size_t k = 8;
  BurstConfig burst;
  Duration barrier_overhead{};
  bool merge_enabled = true;
  /// Criticality at or above which an instance counts as high-criticality.
  double high_criticality = 0.8;
  std::optional<Duration> horizon;

  friend bool operator==(const SchedulerConfig&, const SchedulerConfig&) = default;
};

void validate(const SchedulerConfig& cfg);

struct Workload {
  int version = 1;
  PlatformModel platform;
  ExecModel exec;
  std::vector<DagTemplate> dags;
  std::vector<Mutation> mutations;
  std::vector<InterferenceWindow> interference;
  SchedulerConfig scheduler;
  ContentionTable contention;
  std::vector<CrossDependency> cross;

  [[nodiscard]] const DagTemplate* find(const DagId& id) const;
  friend bool operator==(const Workload&, const Workload&) = default;
};

/// Throws InvalidWorkload naming the offending part.
void validate(const Workload& w);

/// Contention-table key of a template node.
std::string node_key(const DagId& dag, const NodeId& node);

}  // namespace red
