#pragma once

// Slow, obviously-correct reference implementations and generators shared by
// the unit tests and the acceptance binary.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "red/graph.hpp"
#include "red/simulator.hpp"
#include "red/trace.hpp"

namespace oracle {

using red::DagSpec;
using red::Duration;
using red::NodeId;

inline std::string node_name(std::size_t i) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "n%02zu", i);
  return buf;
}

struct RandomDagOptions {
  std::size_t min_nodes = 1;
  std::size_t max_nodes = 8;
  /// Maximum number of nodes per layer.
  std::size_t max_width = 3;
  double edge_probability = 0.5;
  /// Costs are drawn uniformly from [1, max_cost_ms] ms.
  int max_cost_ms = 100;
  /// Probability that a node is a refinable MIMONet stage.
  double refinable_probability = 0.0;
  std::size_t max_decoders = 4;
};

/// Layered random DAG. Every non-source node gets at least one predecessor in
/// an earlier layer, so layers can be skipped by extra edges.
inline DagSpec random_dag(std::mt19937_64& rng, const RandomDagOptions& o = {}) {
  std::uniform_int_distribution<std::size_t> count(o.min_nodes, o.max_nodes);
  std::uniform_int_distribution<std::size_t> width(1, o.max_width);
  std::uniform_int_distribution<int> cost(1, o.max_cost_ms);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const std::size_t n = count(rng);

  std::vector<std::vector<std::size_t>> layers;
  for (std::size_t made = 0; made < n;) {
    std::size_t w = std::min(width(rng), n - made);
    layers.emplace_back();
    for (std::size_t k = 0; k < w; ++k) layers.back().push_back(made++);
  }

  DagSpec d;
  d.id = "g";
  Duration total{};
  for (std::size_t i = 0; i < n; ++i) {
    red::NodeAttrs a;
    if (u(rng) < o.refinable_probability) {
      std::uniform_int_distribution<std::size_t> q(1, o.max_decoders);
      a.enc_cost = red::from_ms(cost(rng));
      Duration max_dec{};
      for (std::size_t j = q(rng); j > 0; --j) {
        a.dec_costs.push_back(red::from_ms(cost(rng)));
        max_dec = std::max(max_dec, a.dec_costs.back());
      }
      a.wcet = *a.enc_cost + max_dec;
      a.encoder_ref = "enc" + std::to_string(i % 2);
    } else {
      a.wcet = red::from_ms(cost(rng));
    }
    a.mem_mb = static_cast<double>(cost(rng)) * 10.0;
    total += a.wcet;
    d.nodes.emplace(node_name(i), a);
  }
  for (std::size_t l = 1; l < layers.size(); ++l) {
    for (auto v : layers[l]) {
      std::uniform_int_distribution<std::size_t> pick(0, layers[l - 1].size() - 1);
      d.edges.insert({node_name(layers[l - 1][pick(rng)]), node_name(v)});
      for (std::size_t e = 0; e < l; ++e) {
        for (auto p : layers[e]) {
          if (u(rng) < o.edge_probability / static_cast<double>(l - e)) d.edges.insert({node_name(p), node_name(v)});
        }
      }
    }
  }
  d.deadline = total + red::from_ms(1);
  return d;
}

/// Longest path by enumerating every source-to-sink path.
inline Duration brute_force_critical_path(const DagSpec& d) {
  std::map<NodeId, std::vector<NodeId>> succ;
  std::map<NodeId, int> indeg;
  for (const auto& [id, _] : d.nodes) indeg[id] = 0;
  for (const auto& e : d.edges) {
    succ[e.from].push_back(e.to);
    ++indeg[e.to];
  }
  Duration best{};
  std::function<void(const NodeId&, Duration)> walk = [&](const NodeId& v, Duration acc) {
    acc += d.nodes.at(v).wcet;
    best = std::max(best, acc);
    for (const auto& s : succ[v]) walk(s, acc);
  };
  for (const auto& [id, deg] : indeg) {
    if (deg == 0) walk(id, Duration{});
  }
  return best;
}

/// Height by recursion over predecessors: 0 for sources, else 1 + max.
inline std::map<NodeId, int> recursive_heights(const DagSpec& d) {
  std::map<NodeId, int> h;
  std::function<int(const NodeId&)> height = [&](const NodeId& v) -> int {
    if (auto it = h.find(v); it != h.end()) return it->second;
    int best = 0;
    for (const auto& e : d.edges) {
      if (e.to == v) best = std::max(best, height(e.from) + 1);
    }
    return h[v] = best;
  };
  for (const auto& [id, _] : d.nodes) height(id);
  return h;
}

/// Cumulative sub-deadline offsets floor(B * prefix_h / total), computed with
/// an explicit long-division on 64-bit limbs.
inline std::vector<Duration> rational_cumulative(const std::vector<Duration>& level_costs, Duration budget) {
  std::int64_t total = 0;
  for (auto c : level_costs) total += c.count();
  std::vector<Duration> out;
  std::int64_t prefix = 0;
  for (auto c : level_costs) {
    prefix += c.count();
    // floor(budget * prefix / total) without overflow: split budget into
    // quotient and remainder w.r.t. total.
    const std::int64_t b = budget.count();
    const std::int64_t q = b / total, r = b % total;
    const auto rp = static_cast<unsigned __int128>(r) * static_cast<unsigned __int128>(prefix);
    out.push_back(Duration{q * prefix + static_cast<std::int64_t>(rp / static_cast<unsigned __int128>(total))});
  }
  return out;
}

/// Start (dispatch that ran to completion) and finish time of every executed
/// unit, keyed by "<instance>/<node>".
struct Timing {
  std::map<std::string, red::TimePoint> start;
  std::map<std::string, red::TimePoint> finish;
};

inline Timing timing_of(const red::SimTrace& trace) {
  Timing t;
  for (const auto& e : trace.events) {
    const auto key = e.dag + "/" + e.node;
    if (e.kind == red::TraceKind::Dispatch) t.start[key] = e.time;
    if (e.kind == red::TraceKind::Finish) t.finish[key] = e.time;
  }
  return t;
}

/// Every (u, v) edge of every instance graph plus enforced cross edges where
/// v started before u finished, or v ran although u never finished.
inline std::vector<std::string> precedence_violations(const red::SimResult& r) {
  const Timing t = timing_of(r.trace);
  std::vector<std::string> bad;
  auto check = [&](const std::string& u, const std::string& v) {
    auto sv = t.start.find(v);
    auto fv = t.finish.find(v);
    if (sv == t.start.end() || fv == t.finish.end()) return;
    auto fu = t.finish.find(u);
    if (fu == t.finish.end() || sv->second < fu->second) bad.push_back(u + " -> " + v);
  };
  for (const auto& in : r.instances) {
    for (const auto& e : in.graph->edges) check(in.id + "/" + e.from, in.id + "/" + e.to);
  }
  for (const auto& [u, v] : r.cross_edges) check(u, v);
  return bad;
}

}  // namespace oracle
