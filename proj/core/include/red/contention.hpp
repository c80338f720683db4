#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "red/common.hpp"
#include "red/deadlines.hpp"
#include "red/graph.hpp"
#include "red/platform.hpp"
#include "red/workload.hpp"

namespace red {

struct CoRunner {
  DagId dag;
  NodeId node;
  double mem_mb = 0.0;
  Duration wcet{};

  friend bool operator==(const CoRunner&, const CoRunner&) = default;
};

/// The subset of at most max_size nodes that can all run alongside the
/// target (pairwise unordered by precedence within a DAG) with the largest
/// combined memory; ties go to the larger combined wcet, then to the
/// lexicographically smallest key list. Throws NodeNotFound.
std::vector<CoRunner> heaviest_corunner_mix(const DagId& dag, const NodeId& node, std::span<const DagSpec> workload,
                                            std::size_t max_size);

/// Co-runs the node with its heaviest mix on the platform (one slot per
/// co-runner, the rest left to the node) and returns the largest observed
/// finish time minus the isolated wcet over all seeds, clipped at zero.
Duration profile_contention(const DagId& dag, const NodeId& node, std::span<const DagSpec> workload,
                            const PlatformModel& platform, const ExecModel& exec, std::span<const std::uint64_t> seeds,
                            std::span<const InterferenceWindow> interference = {});

/// Profiles every atomic node of the workload's templates.
ContentionTable profile_atomic_nodes(const Workload& w, std::span<const std::uint64_t> seeds);

}  // namespace red
