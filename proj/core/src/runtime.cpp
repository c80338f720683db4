#include "red/runtime.hpp"

#include <algorithm>
#include <numeric>
#include <optional>
#include <tuple>

namespace red {

CostEstimator::CostEstimator(std::size_t window) : k_(std::max<std::size_t>(window, 1)) {}

Duration CostEstimator::estimate(const std::string& node, Duration fallback) const {
  auto it = rings_.find(node);
  if (it == rings_.end() || it->second.values.empty()) return fallback;
  const auto& ring = it->second;
  return ring.sum / static_cast<std::int64_t>(ring.values.size());
}

std::vector<Duration> CostEstimator::observations(const std::string& node) const {
  auto it = rings_.find(node);
  if (it == rings_.end()) return {};
  const auto& ring = it->second;
  if (ring.values.size() < k_) return ring.values;
  // Oldest first.
  std::vector<Duration> out;
  out.reserve(k_);
  for (std::size_t i = 0; i < k_; ++i) out.push_back(ring.values[(ring.next + i) % k_]);
  return out;
}

void CostEstimator::observe(const std::string& node, Duration observed) {
  if (observed <= Duration::zero()) {
    throw Error(ErrorCode::NonPositiveObservation, node + ": observed duration must be positive");
  }
  auto it = rings_.find(node);
  if (it == rings_.end()) it = rings_.emplace(node, Ring{}).first;
  auto& ring = it->second;
  if (ring.values.size() < k_) {
    ring.values.push_back(observed);
  } else {
    ring.sum -= ring.values[ring.next];
    ring.values[ring.next] = observed;
    ring.next = (ring.next + 1) % k_;
  }
  ring.sum += observed;
}

CostEstimator update_cost_estimate(CostEstimator est, const std::string& node, Duration observed) {
  est.observe(node, observed);
  return est;
}

QueueKey ReadyQueue::pop() {
  auto it = keys_.begin();
  QueueKey key = *it;
  keys_.erase(it);
  return key;
}

std::vector<QueueKey> edf_select(const ReadyQueue& queue, std::size_t free_slots) {
  std::vector<QueueKey> out;
  for (auto it = queue.begin(); it != queue.end() && out.size() < free_slots; ++it) out.push_back(*it);
  return out;
}

std::string_view to_string(HandlerPhase phase) {
  switch (phase) {
    case HandlerPhase::Ready: return "Ready";
    case HandlerPhase::Running: return "Running";
    case HandlerPhase::IOWait: return "IOWait";
    case HandlerPhase::OOM: return "OOM";
    case HandlerPhase::Done: return "Done";
  }
  return "?";
}

std::string_view to_string(HandlerEvent event) {
  switch (event) {
    case HandlerEvent::Dispatch: return "Dispatch";
    case HandlerEvent::IoStart: return "IoStart";
    case HandlerEvent::IoEnd: return "IoEnd";
    case HandlerEvent::MemFail: return "MemFail";
    case HandlerEvent::MemReclaim: return "MemReclaim";
    case HandlerEvent::Finish: return "Finish";
  }
  return "?";
}

HandlerState fsm_step(const HandlerState& h, HandlerEvent event, TimePoint now) {
  using P = HandlerPhase;
  using E = HandlerEvent;
  std::optional<P> next;
  switch (h.state) {
    case P::Ready:
      if (event == E::Dispatch) next = P::Running;
      break;
    case P::Running:
      if (event == E::IoStart) next = P::IOWait;
      if (event == E::MemFail) next = P::OOM;
      if (event == E::Finish) next = P::Done;
      break;
    case P::IOWait:
      if (event == E::IoEnd) next = P::Running;
      if (event == E::Finish) next = P::Done;
      break;
    case P::OOM:
      if (event == E::MemReclaim) next = P::Ready;
      break;
    case P::Done:
      break;
  }
  if (!next) {
    throw Error(ErrorCode::IllegalTransition, h.node + ": " + std::string(to_string(event)) + " in state " +
                                                  std::string(to_string(h.state)));
  }
  return HandlerState{h.node, *next, now};
}

std::string_view to_string(BarrierKind kind) {
  switch (kind) {
    case BarrierKind::LevelComplete: return "LevelComplete";
    case BarrierKind::EncoderBroadcast: return "EncoderBroadcast";
    case BarrierKind::FsmDone: return "FsmDone";
    case BarrierKind::Periodic: return "Periodic";
  }
  return "?";
}

std::vector<Barrier> emit_barriers(const std::string& dag, std::span<const HandlerView> handlers,
                                   TimePoint now) {
  int max_level = -1;
  for (const auto& h : handlers) max_level = std::max(max_level, h.height);
  const auto levels = static_cast<std::size_t>(max_level + 1);
  std::vector<char> all_done(levels, 1), newly_done(levels, 0);

  auto finished_now = [](const HandlerView& h) {
    return h.after == HandlerPhase::Done && h.before != HandlerPhase::Done;
  };
  for (const auto& h : handlers) {
    auto lvl = static_cast<std::size_t>(h.height);
    if (h.after != HandlerPhase::Done) all_done[lvl] = 0;
    if (finished_now(h)) newly_done[lvl] = 1;
  }

  std::vector<Barrier> out;
  for (const auto& h : handlers) {
    if (!finished_now(h)) continue;
    if (h.shared_encoder && h.consumers_pending) {
      out.push_back({BarrierKind::EncoderBroadcast, dag, h.height, h.node, now});
    }
    auto lvl = static_cast<std::size_t>(h.height);
    if (!(all_done[lvl] && newly_done[lvl])) out.push_back({BarrierKind::FsmDone, dag, h.height, h.node, now});
  }
  for (std::size_t lvl = 0; lvl < levels; ++lvl) {
    if (all_done[lvl] && newly_done[lvl]) {
      out.push_back({BarrierKind::LevelComplete, dag, static_cast<int>(lvl), {}, now});
    }
  }
  return out;
}

std::vector<DispatchGroup> batch_same_height(std::vector<ReadyUnit> units) {
  std::sort(units.begin(), units.end(), [](const ReadyUnit& a, const ReadyUnit& b) {
    return std::tie(a.height, a.deadline, a.id) < std::tie(b.height, b.deadline, b.id);
  });
  std::vector<DispatchGroup> groups;
  for (auto& u : units) {
    if (groups.empty() || groups.back().height != u.height) groups.push_back({u.height, {}});
    groups.back().units.push_back(std::move(u));
  }
  return groups;
}

}  // namespace red
