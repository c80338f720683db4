#include "red/overload.hpp"

#include <algorithm>
#include <limits>
#include <set>
#include <tuple>

namespace red {

void validate(const BurstConfig& cfg) {
  if (!(cfg.theta_u > 0.0 && cfg.theta_u <= 1.0)) throw Error(ErrorCode::ValidationError, "theta_u must be in (0, 1]");
  if (cfg.q_max < 1) throw Error(ErrorCode::ValidationError, "q_max must be >= 1");
  if (cfg.w < 1) throw Error(ErrorCode::ValidationError, "w must be >= 1");
  if (cfg.tick <= Duration::zero()) throw Error(ErrorCode::ValidationError, "tick must be positive");
}

bool detect_overload(std::span<const HealthSample> history, const BurstConfig& cfg) {
  std::size_t run = 0;
  for (const auto& s : history) {
    run = (s.u_gpu > cfg.theta_u || s.q_len > cfg.q_max) ? run + 1 : 0;
    if (run >= cfg.w) return true;
  }
  return false;
}

double criticality_score(Duration slack, Duration deadline_span) {
  if (deadline_span <= Duration::zero()) {
    throw Error(ErrorCode::NonPositiveDeadlineSpan, "deadline span must be positive");
  }
  const double ratio = static_cast<double>(slack.count()) / static_cast<double>(deadline_span.count());
  return std::min(1.0, std::max(0.0, 1.0 - ratio));
}

double projected_utilisation(const Projection& p, Duration queued_work) {
  if (p.window <= Duration::zero()) return std::numeric_limits<double>::infinity();
  return static_cast<double>((p.running_work + queued_work).count()) /
         (p.capacity * static_cast<double>(p.window.count()));
}

DropDecision proactive_drop(ReadyQueue& queue, std::vector<DropCandidate> candidates, const BurstConfig& cfg,
                            const Projection& projection) {
  std::sort(candidates.begin(), candidates.end(), [](const DropCandidate& a, const DropCandidate& b) {
    if (a.score != b.score) return a.score < b.score;
    if (a.slack != b.slack) return a.slack > b.slack;
    return a.key.id < b.key.id;
  });

  Duration queued{};
  for (const auto& c : candidates) queued += c.estimate;
  std::set<std::string> gone;

  DropDecision out;
  const std::size_t q0 = queue.size();
  const std::size_t cap = (q0 > cfg.q_max ? q0 - cfg.q_max : 0) + 1;
  auto satisfied = [&] {
    return queue.size() <= cfg.q_max && projected_utilisation(projection, queued) <= cfg.theta_u;
  };

  for (const auto& victim : candidates) {
    if (out.victims.size() >= cap || satisfied()) break;
    if (gone.count(victim.instance)) continue;
    if (victim.score >= 1.0) break;
    out.victims.push_back(victim.key);
    out.dropped_instances.push_back(victim.instance);
    gone.insert(victim.instance);
    for (const auto& c : candidates) {
      if (c.instance != victim.instance) continue;
      if (queue.erase(c.key)) {
        out.removed.push_back(c.key);
        queued -= c.estimate;
      }
    }
  }
  return out;
}

}  // namespace red
