#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "red/metrics.hpp"
#include "red/simulator.hpp"
#include "red/workload.hpp"

namespace red {

struct ExperimentConfig {
  std::vector<Variant> variants;
  std::vector<std::uint64_t> seeds;
  std::filesystem::path out_dir;
  double lambda = 1.0;
  /// Worker cap; 0 means RED_SIM_THREADS or the hardware concurrency.
  std::size_t threads = 0;
};

struct ExperimentResult {
  std::map<std::string, std::map<std::uint64_t, RunSummary>> summaries;
  ComparisonReport report;
};

/// Runs every (variant, seed) pair and writes trace_<v>_s<seed>.tsv,
/// outcomes_<v>_s<seed>.csv, summary.csv and comparison.csv into out_dir.
/// Every file is written atomically. Throws IoError and simulator errors.
ExperimentResult run_experiment(const Workload& workload, const ExperimentConfig& config);

/// Recomputes the comparison from out_dir/summary.csv and rewrites
/// out_dir/comparison.csv.
ComparisonReport compare_directory(const std::filesystem::path& out_dir);

/// Worker count honouring RED_SIM_THREADS.
std::size_t worker_threads(std::size_t requested = 0);

std::string trace_file_name(Variant v, std::uint64_t seed);
std::string outcomes_file_name(Variant v, std::uint64_t seed);

}  // namespace red
