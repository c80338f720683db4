#include "red/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <unordered_map>

namespace red {

double qoe_score(Duration exec_time, Duration slack, double lambda) {
  const double overrun = std::max(0.0, to_seconds(exec_time - slack));
  if (overrun == 0.0) return 1.0;
  return 1.0 / (1.0 + std::exp(lambda) * overrun);
}

std::string_view to_string(OutcomeStatus s) {
  switch (s) {
    case OutcomeStatus::Met: return "Met";
    case OutcomeStatus::Missed: return "Missed";
    case OutcomeStatus::Dropped: return "Dropped";
  }
  return "?";
}

std::optional<Duration> TaskOutcome::response_time() const {
  if (!finish) return std::nullopt;
  return *finish - release;
}

namespace {

struct Accum {
  TaskOutcome out;
  std::size_t nodes = 0;
  std::size_t finished = 0;
  TimePoint last_finish{};
  bool dropped = false;
  std::string drop_reason;
};

std::int64_t parse_int(const std::string& s, const char* what) {
  try {
    std::size_t pos = 0;
    auto v = std::stoll(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(what);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorCode::ParseError, std::string("bad ") + what + " '" + s + "'");
  }
}

}  // namespace

std::vector<TaskOutcome> outcomes(const SimTrace& trace) {
  std::vector<Accum> acc;
  std::unordered_map<std::string, std::size_t> index;
  auto find = [&](const std::string& id) -> Accum& {
    auto it = index.find(id);
    if (it == index.end()) throw Error(ErrorCode::IncompleteTrace, "event for unreleased instance " + id);
    return acc[it->second];
  };
  for (const auto& e : trace.events) {
    switch (e.kind) {
      case TraceKind::Release: {
        Accum a;
        a.out.dag = std::string(template_of(e.dag));
        a.out.instance = e.dag;
        a.out.release = e.time;
        a.out.deadline = TimePoint{parse_int(extra_field(e.extra, "deadline").value_or(""), "deadline")};
        a.nodes = static_cast<std::size_t>(parse_int(extra_field(e.extra, "nodes").value_or(""), "nodes"));
        index.emplace(e.dag, acc.size());
        acc.push_back(std::move(a));
        break;
      }
      case TraceKind::Dispatch: {
        auto& a = find(e.dag);
        if (!a.out.start) a.out.start = e.time;
        break;
      }
      case TraceKind::Finish: {
        auto& a = find(e.dag);
        ++a.finished;
        a.last_finish = std::max(a.last_finish, e.time);
        break;
      }
      case TraceKind::Drop: {
        auto& a = find(e.dag);
        if (!a.dropped) a.drop_reason = extra_field(e.extra, "reason").value_or("Unknown");
        a.dropped = true;
        break;
      }
      default: break;
    }
  }
  std::vector<TaskOutcome> out;
  out.reserve(acc.size());
  for (auto& a : acc) {
    if (a.dropped) {
      a.out.status = OutcomeStatus::Dropped;
    } else if (a.finished == a.nodes) {
      a.out.finish = a.last_finish;
      a.out.status = a.last_finish <= a.out.deadline ? OutcomeStatus::Met : OutcomeStatus::Missed;
    } else {
      throw Error(ErrorCode::IncompleteTrace, "instance " + a.out.instance + " finished " +
                                                  std::to_string(a.finished) + " of " + std::to_string(a.nodes) +
                                                  " nodes");
    }
    out.push_back(std::move(a.out));
  }
  return out;
}

double percentile(const std::vector<double>& sorted, double p) {
  if (sorted.empty()) return 0.0;
  auto rank = static_cast<std::size_t>(std::ceil(p / 100.0 * static_cast<double>(sorted.size())));
  rank = std::clamp<std::size_t>(rank, 1, sorted.size());
  return sorted[rank - 1];
}

RunSummary summarize(const SimTrace& trace, double lambda) {
  RunSummary s;
  const auto rows = outcomes(trace);
  std::vector<double> resp;
  double qoe_sum = 0.0;
  for (const auto& o : rows) {
    ++s.released;
    switch (o.status) {
      case OutcomeStatus::Met: ++s.met; break;
      case OutcomeStatus::Missed: ++s.missed; break;
      case OutcomeStatus::Dropped: ++s.dropped; break;
    }
    if (o.finish) {
      resp.push_back(to_ms(*o.response_time()));
      const TimePoint start = o.start.value_or(o.release);
      qoe_sum += qoe_score(*o.finish - start, o.deadline - start, lambda);
    }
  }
  std::sort(resp.begin(), resp.end());
  if (!resp.empty()) {
    s.mean_response_ms = std::accumulate(resp.begin(), resp.end(), 0.0) / static_cast<double>(resp.size());
    s.qoe = qoe_sum / static_cast<double>(resp.size());
  }
  s.p50_ms = percentile(resp, 50);
  s.p95_ms = percentile(resp, 95);
  s.p99_ms = percentile(resp, 99);
  s.miss_drop_rate =
      s.released == 0 ? 0.0 : static_cast<double>(s.missed + s.dropped) / static_cast<double>(s.released);

  std::set<std::string> enc_units;
  std::map<std::string, std::string> drop_reason;
  for (const auto& e : trace.events) {
    if (e.kind == TraceKind::Barrier) ++s.barrier_count;
    if (e.kind == TraceKind::Dispatch && extra_field(e.extra, "enc")) {
      enc_units.insert(extra_field(e.extra, "unit").value_or(e.dag + "/" + e.node));
    }
    if (e.kind == TraceKind::Drop) drop_reason.emplace(e.dag, extra_field(e.extra, "reason").value_or("Unknown"));
  }
  s.encoder_executions = enc_units.size();
  for (const auto& [inst, reason] : drop_reason) ++s.drops_by_reason[reason];
  return s;
}

const std::vector<std::pair<std::string, bool>>& comparison_metrics() {
  static const std::vector<std::pair<std::string, bool>> m = {
      {"miss_drop_rate", true}, {"mean_response_ms", true}, {"p99_ms", true},
      {"qoe", false},           {"barrier_count", true},    {"encoder_executions", true}};
  return m;
}

double metric_value(const RunSummary& s, const std::string& metric) {
  if (metric == "miss_drop_rate") return s.miss_drop_rate;
  if (metric == "mean_response_ms") return s.mean_response_ms;
  if (metric == "p50_ms") return s.p50_ms;
  if (metric == "p95_ms") return s.p95_ms;
  if (metric == "p99_ms") return s.p99_ms;
  if (metric == "qoe") return s.qoe;
  if (metric == "barrier_count") return static_cast<double>(s.barrier_count);
  if (metric == "encoder_executions") return static_cast<double>(s.encoder_executions);
  throw Error(ErrorCode::ValidationError, "unknown metric " + metric);
}

ComparisonReport compare(const std::map<std::string, std::map<std::uint64_t, RunSummary>>& summaries) {
  ComparisonReport report;
  const std::map<std::uint64_t, RunSummary>* first = nullptr;
  for (const auto& [name, runs] : summaries) {
    if (!first) {
      first = &runs;
      continue;
    }
    bool same = runs.size() == first->size();
    for (auto it = runs.begin(), jt = first->begin(); same && it != runs.end(); ++it, ++jt) same = it->first == jt->first;
    if (!same) throw Error(ErrorCode::MismatchedExperiment, "variant " + name + " ran a different seed set");
  }
  for (auto a = summaries.begin(); a != summaries.end(); ++a) {
    for (auto b = std::next(a); b != summaries.end(); ++b) {
      for (const auto& [metric, lower_better] : comparison_metrics()) {
        ComparisonRow row;
        row.a = a->first;
        row.b = b->first;
        row.metric = metric;
        std::size_t wa = 0, wb = 0;
        double delta = 0.0;
        for (const auto& [seed, sa] : a->second) {
          const auto& sb = b->second.at(seed);
          const double va = metric_value(sa, metric);
          const double vb = metric_value(sb, metric);
          delta += va - vb;
          if (va != vb) ((va < vb) == lower_better ? wa : wb) += 1;
          ++row.pairs;
        }
        if (row.pairs > 0) {
          const auto n = static_cast<double>(row.pairs);
          row.mean_delta = delta / n;
          row.win_a = static_cast<double>(wa) / n;
          row.win_b = static_cast<double>(wb) / n;
        }
        report.rows.push_back(std::move(row));
      }
    }
  }
  return report;
}

namespace {

// Shortest text that parses back to the same double.
std::string num(double v) {
  char buf[32];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::string opt_ns(const std::optional<TimePoint>& t) { return t ? std::to_string(t->count()) : std::string{}; }

}  // namespace

void write_outcomes_csv(std::ostream& out, const std::vector<TaskOutcome>& rows) {
  out << "dag_id,instance,release_ns,start_ns,finish_ns,deadline_ns,status,response_ns\n";
  for (const auto& o : rows) {
    auto rt = o.response_time();
    out << o.dag << ',' << o.instance << ',' << o.release.count() << ',' << opt_ns(o.start) << ','
        << opt_ns(o.finish) << ',' << o.deadline.count() << ',' << to_string(o.status) << ','
        << (rt ? std::to_string(rt->count()) : std::string{}) << '\n';
  }
}

void write_summary_csv_header(std::ostream& out) {
  out << "variant,seed,released,met,missed,dropped,miss_drop_rate,mean_response_ms,p50_ms,p95_ms,p99_ms,qoe,"
         "barrier_count,encoder_executions,drops_by_reason\n";
}

void write_summary_csv_row(std::ostream& out, const std::string& variant, std::uint64_t seed, const RunSummary& s) {
  std::string reasons;
  for (const auto& [r, n] : s.drops_by_reason) {
    if (!reasons.empty()) reasons += '|';
    reasons += r + ":" + std::to_string(n);
  }
  out << variant << ',' << seed << ',' << s.released << ',' << s.met << ',' << s.missed << ',' << s.dropped << ','
      << num(s.miss_drop_rate) << ',' << num(s.mean_response_ms) << ',' << num(s.p50_ms) << ',' << num(s.p95_ms)
      << ',' << num(s.p99_ms) << ',' << num(s.qoe) << ',' << s.barrier_count << ',' << s.encoder_executions << ','
      << reasons << '\n';
}

void write_comparison_csv(std::ostream& out, const ComparisonReport& report) {
  out << "variant_a,variant_b,metric,mean_delta,win_a,win_b,pairs\n";
  for (const auto& r : report.rows) {
    out << r.a << ',' << r.b << ',' << r.metric << ',' << num(r.mean_delta) << ',' << num(r.win_a) << ','
        << num(r.win_b) << ',' << r.pairs << '\n';
  }
}

std::map<std::string, std::map<std::uint64_t, RunSummary>> read_summary_csv(std::istream& in) {
  std::map<std::string, std::map<std::uint64_t, RunSummary>> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (lineno == 1 || line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string part;
    while (std::getline(ss, part, ',')) f.push_back(part);
    if (f.size() == 14) f.emplace_back();
    if (f.size() != 15) throw Error(ErrorCode::ParseError, "summary line " + std::to_string(lineno));
    auto d = [&](const std::string& s) {
      try {
        return std::stod(s);
      } catch (const std::exception&) {
        throw Error(ErrorCode::ParseError, "summary line " + std::to_string(lineno) + ": bad number");
      }
    };
    auto u = [&](const std::string& s) { return static_cast<std::size_t>(parse_int(s, "count")); };
    RunSummary s;
    s.released = u(f[2]);
    s.met = u(f[3]);
    s.missed = u(f[4]);
    s.dropped = u(f[5]);
    s.miss_drop_rate = d(f[6]);
    s.mean_response_ms = d(f[7]);
    s.p50_ms = d(f[8]);
    s.p95_ms = d(f[9]);
    s.p99_ms = d(f[10]);
    s.qoe = d(f[11]);
    s.barrier_count = u(f[12]);
    s.encoder_executions = u(f[13]);
    std::stringstream rs(f[14]);
    while (std::getline(rs, part, '|')) {
      auto colon = part.find(':');
      if (colon != std::string::npos) s.drops_by_reason[part.substr(0, colon)] = u(part.substr(colon + 1));
    }
    out[f[0]][static_cast<std::uint64_t>(parse_int(f[1], "seed"))] = s;
  }
  return out;
}

}  // namespace red
