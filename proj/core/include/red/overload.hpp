#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "red/common.hpp"
#include "red/runtime.hpp"

namespace red {

struct HealthSample {
  long tick = 0;
  double u_gpu = 0.0;
  std::size_t q_len = 0;
};

struct BurstConfig {
  double theta_u = 0.90;
  std::size_t q_max = 8;
  std::size_t w = 3;
  Duration tick = from_ms(5);
  /// When false the monitor still runs but nothing is shed.
  bool enabled = true;

  friend bool operator==(const BurstConfig&, const BurstConfig&) = default;
};

void validate(const BurstConfig& cfg);

/// True iff the history holds w consecutive samples with u > theta_u or
/// q_len > q_max.
bool detect_overload(std::span<const HealthSample> history, const BurstConfig& cfg);

/// min(1, max(0, 1 - slack/span)). Throws NonPositiveDeadlineSpan.
double criticality_score(Duration slack, Duration deadline_span);

/// A ready unit as seen by the shedder.
struct DropCandidate {
  QueueKey key;
  /// DAG instance the unit belongs to.
  std::string instance;
  double score = 0.0;
  Duration slack{};
  Duration estimate{};
};

struct DropDecision {
  /// Units picked directly, in drop order.
  std::vector<QueueKey> victims;
  /// Every queued unit removed, victims plus their instance siblings.
  std::vector<QueueKey> removed;
  std::vector<std::string> dropped_instances;
};

/// Load the shedder projects onto the slots if the queue were kept.
struct Projection {
  /// Remaining work already running on the slots.
  Duration running_work{};
  /// Window over which the queued work has to be served.
  Duration window{};
  double capacity = 1.0;
};

/// Drops the lowest-score units (ties: largest slack, then id) together with
/// every queued unit of the same instance, until q_len <= q_max and the
/// projected utilisation is <= theta_u, or only score-1 units remain. At most
/// max(0, q_len - q_max) + 1 victims per call. The queue is updated in place.
DropDecision proactive_drop(ReadyQueue& queue, std::vector<DropCandidate> candidates, const BurstConfig& cfg,
                            const Projection& projection);

/// Projected utilisation of running work plus the given queued work.
double projected_utilisation(const Projection& p, Duration queued_work);

}  // namespace red
