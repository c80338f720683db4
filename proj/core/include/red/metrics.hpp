#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "red/common.hpp"
#include "red/trace.hpp"

namespace red {

/// 1 / (1 + e^lambda * max(0, C - S)), with the overrun in seconds.
double qoe_score(Duration exec_time, Duration slack, double lambda);

enum class OutcomeStatus { Met, Missed, Dropped };

std::string_view to_string(OutcomeStatus s);

struct TaskOutcome {
  std::string dag;
  std::string instance;
  TimePoint release{};
  std::optional<TimePoint> start;
  std::optional<TimePoint> finish;
  TimePoint deadline{};
  OutcomeStatus status = OutcomeStatus::Met;

  [[nodiscard]] std::optional<Duration> response_time() const;
  friend bool operator==(const TaskOutcome&, const TaskOutcome&) = default;
};

struct RunSummary {
  std::size_t released = 0;
  std::size_t met = 0;
  std::size_t missed = 0;
  std::size_t dropped = 0;
  double mean_response_ms = 0.0;
  double p50_ms = 0.0;
  double p95_ms = 0.0;
  double p99_ms = 0.0;
  double miss_drop_rate = 0.0;
  double qoe = 1.0;
  std::size_t barrier_count = 0;
  std::size_t encoder_executions = 0;
  std::map<std::string, std::size_t> drops_by_reason;

  friend bool operator==(const RunSummary&, const RunSummary&) = default;
};

/// Rebuilds one outcome per released instance from the trace.
std::vector<TaskOutcome> outcomes(const SimTrace& trace);

/// Throws IncompleteTrace when an instance neither finished every node nor
/// was dropped.
RunSummary summarize(const SimTrace& trace, double lambda = 1.0);

/// Nearest-rank percentile of an ascending sample (p in [0, 100]).
double percentile(const std::vector<double>& sorted, double p);

struct ComparisonRow {
  std::string a;
  std::string b;
  std::string metric;
  /// Mean over seeds of metric(a) - metric(b).
  double mean_delta = 0.0;
  /// Fraction of seeds where a is strictly better / b is strictly better.
  double win_a = 0.0;
  double win_b = 0.0;
  std::size_t pairs = 0;
};

struct ComparisonReport {
  std::vector<ComparisonRow> rows;
};

/// Every ordered pair (a < b by name) over every metric. Throws
/// MismatchedExperiment when the seed sets differ.
ComparisonReport compare(const std::map<std::string, std::map<std::uint64_t, RunSummary>>& summaries);

/// Names of the metrics compared and whether lower is better.
const std::vector<std::pair<std::string, bool>>& comparison_metrics();
double metric_value(const RunSummary& s, const std::string& metric);

void write_outcomes_csv(std::ostream& out, const std::vector<TaskOutcome>& rows);
void write_summary_csv_header(std::ostream& out);
void write_summary_csv_row(std::ostream& out, const std::string& variant, std::uint64_t seed, const RunSummary& s);
void write_comparison_csv(std::ostream& out, const ComparisonReport& report);

/// Parses a file written by write_summary_csv_*; keyed by variant then seed.
std::map<std::string, std::map<std::uint64_t, RunSummary>> read_summary_csv(std::istream& in);

}  // namespace red
