#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "red/common.hpp"
#include "red/graph.hpp"

namespace red {

// ---------------------------------------------------------------------------
// Online cost estimation

/// Moving average over the last k observed completions per node, falling
/// back to the offline WCET until the first observation.
class CostEstimator {
 public:
  explicit CostEstimator(std::size_t window = 8);

  [[nodiscard]] std::size_t window() const noexcept { return k_; }
  [[nodiscard]] Duration estimate(const std::string& node, Duration fallback) const;
  [[nodiscard]] std::vector<Duration> observations(const std::string& node) const;

  /// Throws NonPositiveObservation for observed <= 0.
  void observe(const std::string& node, Duration observed);

 private:
  struct Ring {
    std::vector<Duration> values;
    std::size_t next = 0;
    Duration sum{};
  };
  std::size_t k_;
  std::map<std::string, Ring, std::less<>> rings_;
};

/// Value-semantics form: returns the estimator with one more observation.
CostEstimator update_cost_estimate(CostEstimator est, const std::string& node, Duration observed);

// ---------------------------------------------------------------------------
// EDF ready queue

struct QueueKey {
  TimePoint deadline{};
  std::string id;

  friend auto operator<=>(const QueueKey&, const QueueKey&) = default;
  friend bool operator==(const QueueKey&, const QueueKey&) = default;
};

/// Dispatchable units ordered by (absolute sub-deadline, id).
class ReadyQueue {
 public:
  void push(TimePoint deadline, std::string id) { keys_.insert({deadline, std::move(id)}); }
  bool erase(const QueueKey& key) { return keys_.erase(key) > 0; }
  [[nodiscard]] bool empty() const noexcept { return keys_.empty(); }
  [[nodiscard]] std::size_t size() const noexcept { return keys_.size(); }
  [[nodiscard]] const QueueKey& top() const { return *keys_.begin(); }
  QueueKey pop();

  [[nodiscard]] auto begin() const { return keys_.begin(); }
  [[nodiscard]] auto end() const { return keys_.end(); }

 private:
  std::set<QueueKey> keys_;
};

/// Up to free_slots units with the smallest deadlines; ties by id.
std::vector<QueueKey> edf_select(const ReadyQueue& queue, std::size_t free_slots);

// ---------------------------------------------------------------------------
// Handler finite-state machine

enum class HandlerPhase { Ready, Running, IOWait, OOM, Done };
enum class HandlerEvent { Dispatch, IoStart, IoEnd, MemFail, MemReclaim, Finish };

std::string_view to_string(HandlerPhase phase);
std::string_view to_string(HandlerEvent event);

struct HandlerState {
  std::string node;
  HandlerPhase state = HandlerPhase::Ready;
  TimePoint entered_at{};

  friend bool operator==(const HandlerState&, const HandlerState&) = default;
};

/// Legal transitions:
///   Ready   --Dispatch-->   Running
///   Running --IoStart-->    IOWait
///   Running --MemFail-->    OOM
///   Running --Finish-->     Done
///   IOWait  --IoEnd-->      Running
///   IOWait  --Finish-->     Done
///   OOM     --MemReclaim--> Ready
/// Anything else throws IllegalTransition.
HandlerState fsm_step(const HandlerState& h, HandlerEvent event, TimePoint now);

// ---------------------------------------------------------------------------
// On-demand synchronization

enum class BarrierKind { LevelComplete, EncoderBroadcast, FsmDone, Periodic };

std::string_view to_string(BarrierKind kind);

struct Barrier {
  BarrierKind kind = BarrierKind::FsmDone;
  std::string dag;
  int level = -1;
  std::string node;
  TimePoint emitted_at{};

  friend bool operator==(const Barrier&, const Barrier&) = default;
};

/// One handler as seen by the synchronizer in a dispatch cycle: its state at
/// the end of the previous cycle and now.
struct HandlerView {
  std::string node;
  int height = 0;
  bool shared_encoder = false;
  /// Some consumer of this node's output has not started yet.
  bool consumers_pending = false;
  HandlerPhase before = HandlerPhase::Ready;
  HandlerPhase after = HandlerPhase::Ready;
};

/// Barriers whose trigger became true this cycle, in a fixed order:
/// EncoderBroadcast for finished shared encoders with waiting consumers,
/// FsmDone for completions not covered by a level barrier, then
/// LevelComplete for every level that just finished. One pass over the
/// handlers.
std::vector<Barrier> emit_barriers(const std::string& dag, std::span<const HandlerView> handlers,
                                   TimePoint now);

// ---------------------------------------------------------------------------
// Multi-DAG batching

struct ReadyUnit {
  std::string id;
  std::string dag;
  int height = 0;
  TimePoint deadline{};

  friend bool operator==(const ReadyUnit&, const ReadyUnit&) = default;
};

struct DispatchGroup {
  int height = 0;
  std::vector<ReadyUnit> units;
};

/// Groups ready units by height across DAGs (ascending height); each group
/// keeps EDF order.
std::vector<DispatchGroup> batch_same_height(std::vector<ReadyUnit> units);

}  // namespace red
