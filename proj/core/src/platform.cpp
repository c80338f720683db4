#include "red/platform.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace red {

std::size_t PlatformModel::full_slots() const { return static_cast<std::size_t>(std::floor(rho)); }

double PlatformModel::fractional_speed() const { return rho - std::floor(rho); }

std::size_t PlatformModel::slot_count() const { return full_slots() + (fractional_speed() > 0.0 ? 1 : 0); }

void validate(const PlatformModel& p) {
  if (!(p.rho >= 1.0) || !std::isfinite(p.rho)) throw Error(ErrorCode::ValidationError, "platform.rho must be >= 1");
  if (p.tick <= Duration::zero()) throw Error(ErrorCode::ValidationError, "platform.tick must be positive");
  if (!(p.mem_capacity_mb >= 0.0)) throw Error(ErrorCode::ValidationError, "platform.mem_capacity_mb must be >= 0");
  if (!(p.contention_per_gb >= 0.0)) {
    throw Error(ErrorCode::ValidationError, "platform.contention_per_gb must be >= 0");
  }
}

void validate(const InterferenceWindow& w) {
  if (!(w.start < w.end)) throw Error(ErrorCode::ValidationError, "interference window needs start < end");
  if (!(w.slowdown >= 1.0)) throw Error(ErrorCode::ValidationError, "interference slowdown must be >= 1");
}

double active_slowdown(std::span<const InterferenceWindow> windows, TimePoint t) {
  double s = 1.0;
  for (const auto& w : windows) {
    if (w.start <= t && t < w.end) s *= w.slowdown;
  }
  return s;
}

std::string_view to_string(ExecDistribution d) {
  return d == ExecDistribution::Uniform ? "Uniform" : "Deterministic";
}

void validate(const ExecModel& m) {
  if (!(m.alpha > 0.0 && m.alpha <= 1.0)) throw Error(ErrorCode::ValidationError, "exec.alpha must be in (0, 1]");
  auto prob = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (!prob(m.io_probability) || !prob(m.oom_probability)) {
    throw Error(ErrorCode::ValidationError, "fault probabilities must be in [0, 1]");
  }
  if (m.io_dwell < Duration::zero() || m.oom_dwell < Duration::zero()) {
    throw Error(ErrorCode::ValidationError, "fault dwell times must be >= 0");
  }
}

namespace {

// FNV-1a, so streams do not depend on the standard library's std::hash.
std::uint32_t fnv1a(std::string_view s) {
  std::uint32_t h = 2166136261u;
  for (unsigned char c : s) h = (h ^ c) * 16777619u;
  return h;
}

}  // namespace

Rng::Rng(std::uint64_t seed, std::string_view a, std::string_view b, std::uint64_t c) : engine_() {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    fnv1a(a),
                    fnv1a(b), static_cast<std::uint32_t>(c)};
  engine_.seed(seq);
}

Duration sample_exec(Duration wcet, const ExecModel& model, double slowdown, Rng& rng) {
  double base = static_cast<double>(wcet.count());
  if (model.distribution == ExecDistribution::Uniform) {
    base *= model.alpha + (1.0 - model.alpha) * rng.uniform01();
  }
  auto ns = static_cast<std::int64_t>(std::llround(base * slowdown));
  return Duration{std::max<std::int64_t>(ns, 1)};
}

}  // namespace red
