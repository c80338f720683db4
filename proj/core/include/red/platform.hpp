#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>

#include "red/common.hpp"

namespace red {

struct PlatformModel {
  std::string name = "sim";
  /// Effective parallelism factor: floor(rho) full-speed slots plus one
  /// fractional-speed slot when rho is not an integer.
  double rho = 1.0;
  /// Scheduler quantum; also the period of the fixed-interval barriers used
  /// by the baseline variants.
  Duration tick = from_ms(5);
  double mem_capacity_mb = 0.0;
  /// Execution slowdown per GB of memory held by other running units.
  double contention_per_gb = 0.0;

  [[nodiscard]] std::size_t full_slots() const;
  [[nodiscard]] double fractional_speed() const;
  [[nodiscard]] std::size_t slot_count() const;

  friend bool operator==(const PlatformModel&, const PlatformModel&) = default;
};

void validate(const PlatformModel& p);

struct InterferenceWindow {
  TimePoint start{};
  TimePoint end{};
  double slowdown = 1.0;

  friend bool operator==(const InterferenceWindow&, const InterferenceWindow&) = default;
};

void validate(const InterferenceWindow& w);

/// Product of the slowdowns of all windows containing t (start inclusive,
/// end exclusive).
double active_slowdown(std::span<const InterferenceWindow> windows, TimePoint t);

enum class ExecDistribution { Deterministic, Uniform };

std::string_view to_string(ExecDistribution d);

struct ExecModel {
  ExecDistribution distribution = ExecDistribution::Deterministic;
  double alpha = 0.7;
  /// Fault injection; off by default.
  double io_probability = 0.0;
  Duration io_dwell{};
  double oom_probability = 0.0;
  Duration oom_dwell{};

  friend bool operator==(const ExecModel&, const ExecModel&) = default;
};

void validate(const ExecModel& m);

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  Rng(std::uint64_t seed, std::string_view a, std::string_view b, std::uint64_t c = 0);

  /// Uniform in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

/// Base sample (wcet, or uniform in [alpha*wcet, wcet]) times the slowdown.
/// Never returns less than 1 ns.
Duration sample_exec(Duration wcet, const ExecModel& model, double slowdown, Rng& rng);

}  // namespace red
