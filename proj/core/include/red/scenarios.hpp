#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "red/workload.hpp"

namespace red {

enum class DeadlineMode { Tight, Loose };

DeadlineMode parse_deadline_mode(std::string_view s);

struct ScenarioOptions {
  /// Multiplies every cost ("ms at scale 1").
  double scale = 1.0;
  std::uint64_t seed = 0;
  DeadlineMode deadline = DeadlineMode::Tight;
  /// Nominal wcet utilisation of the rho-wide platform.
  double load = 0.85;
  /// Releases per template.
  std::size_t instances = 24;
  /// Seeded GPU interference windows.
  bool interference = false;
  /// I/O dwell and OOM retry injection.
  bool faults = false;
};

/// Built-in scenario names. burst and nonpartitionable take an optional
/// percentage, e.g. "burst(50)" or "nonpartitionable(25)".
const std::vector<std::string>& scenario_names();

/// Pure function of (name, options). Throws UnknownScenario.
Workload generate_scenario(std::string_view name, const ScenarioOptions& options = {});

/// Makespan of one release under list scheduling with wcets on the
/// platform's slots (fractional slot at its reduced speed).
Duration deterministic_makespan(const DagSpec& dag, const PlatformModel& platform);

}  // namespace red
