#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "red/common.hpp"
#include "red/graph.hpp"
#include "red/trace.hpp"
#include "red/workload.hpp"

namespace red {

/// EDF: unrefined DAG, end-to-end deadlines, fixed-interval barriers.
/// RED_FG: refined DAG with the initial proportional sub-deadlines.
/// RED_IDA: RED_FG plus residual reassignment at every completion.
/// RED: RED_IDA plus on-demand barriers, encoder merging and burst shedding.
enum class Variant { EDF, RED_FG, RED_IDA, RED };

inline constexpr std::array<Variant, 4> kAllVariants = {Variant::EDF, Variant::RED_FG, Variant::RED_IDA,
                                                        Variant::RED};

std::string_view to_string(Variant v);
/// Accepts EDF, RED_FG, RED-FG, RED_IDA, RED-IDA, RED (case-insensitive).
Variant parse_variant(std::string_view s);

struct InstanceRecord {
  std::string id;
  DagId dag;
  TimePoint arrival{};
  TimePoint deadline{};
  /// The graph the instance was scheduled on (refined for RED variants).
  std::shared_ptr<const DagSpec> graph;
};

struct SimResult {
  SimTrace trace;
  std::vector<InstanceRecord> instances;
  /// Enforced cross-DAG precedences as (instance/node, instance/node).
  std::vector<std::pair<std::string, std::string>> cross_edges;
  /// Instances that had a queued unit with criticality >= the configured
  /// threshold when overload was detected.
  std::set<std::string> high_criticality;
};

/// Runs the workload under its own platform and scheduler config.
SimResult run(const Workload& workload, Variant variant, std::uint64_t seed);

/// Pure function of its arguments. Throws InvalidWorkload and
/// HorizonExceeded.
SimResult run(const Workload& workload, const PlatformModel& platform, Variant variant,
              const SchedulerConfig& cfg, std::uint64_t seed);

/// Unit id of a node inside an instance.
std::string unit_id(const std::string& instance, const NodeId& node);

/// Instance id "<dag>#<k>" with k zero-padded to four digits.
std::string instance_id(const DagId& dag, std::size_t k);

}  // namespace red
