#include "red/experiment.hpp"

#include <atomic>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "red/workload_io.hpp"

namespace red {

std::size_t worker_threads(std::size_t requested) {
  std::size_t n = requested;
  if (n == 0) n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("RED_SIM_THREADS")) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && cap > 0) n = std::min(n, static_cast<std::size_t>(cap));
  }
  return std::max<std::size_t>(n, 1);
}

std::string trace_file_name(Variant v, std::uint64_t seed) {
  return "trace_" + std::string(to_string(v)) + "_s" + std::to_string(seed) + ".tsv";
}

std::string outcomes_file_name(Variant v, std::uint64_t seed) {
  return "outcomes_" + std::string(to_string(v)) + "_s" + std::to_string(seed) + ".csv";
}

ExperimentResult run_experiment(const Workload& workload, const ExperimentConfig& cfg) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(cfg.out_dir, ec);
  if (ec || !fs::is_directory(cfg.out_dir)) throw Error(ErrorCode::IoError, "cannot create " + cfg.out_dir.string());

  struct Job {
    Variant variant;
    std::uint64_t seed;
    RunSummary summary;
  };
  std::vector<Job> jobs;
  for (auto v : cfg.variants) {
    for (auto s : cfg.seeds) jobs.push_back({v, s, {}});
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= jobs.size()) return;
      {
        std::lock_guard lock(failure_mu);
        if (failure) return;
      }
      try {
        auto& job = jobs[i];
        SimResult r = run(workload, job.variant, job.seed);
        std::ostringstream trace, out;
        write_trace(trace, r.trace);
        write_file_atomic(cfg.out_dir / trace_file_name(job.variant, job.seed), trace.str());
        write_outcomes_csv(out, outcomes(r.trace));
        write_file_atomic(cfg.out_dir / outcomes_file_name(job.variant, job.seed), out.str());
        job.summary = summarize(r.trace, cfg.lambda);
      } catch (...) {
        std::lock_guard lock(failure_mu);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const std::size_t n = std::min(worker_threads(cfg.threads), std::max<std::size_t>(jobs.size(), 1));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);

  ExperimentResult result;
  std::ostringstream summary;
  write_summary_csv_header(summary);
  for (const auto& job : jobs) {
    write_summary_csv_row(summary, std::string(to_string(job.variant)), job.seed, job.summary);
    result.summaries[std::string(to_string(job.variant))][job.seed] = job.summary;
  }
  write_file_atomic(cfg.out_dir / "summary.csv", summary.str());
  result.report = compare(result.summaries);
  std::ostringstream cmp;
  write_comparison_csv(cmp, result.report);
  write_file_atomic(cfg.out_dir / "comparison.csv", cmp.str());
  return result;
}

ComparisonReport compare_directory(const std::filesystem::path& out_dir) {
  std::ifstream in(out_dir / "summary.csv");
  if (!in) throw Error(ErrorCode::IoError, "cannot read " + (out_dir / "summary.csv").string());
  auto report = compare(read_summary_csv(in));
  std::ostringstream cmp;
  write_comparison_csv(cmp, report);
  write_file_atomic(out_dir / "comparison.csv", cmp.str());
  return report;
}

}  // namespace red
