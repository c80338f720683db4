#pragma once

#include <initializer_list>
#include <string>
#include <utility>

#include "red/common.hpp"
#include "red/graph.hpp"

namespace fixture {

using red::DagSpec;
using red::Duration;
using red::NodeAttrs;

inline NodeAttrs node(Duration wcet) {
  NodeAttrs a;
  a.wcet = wcet;
  return a;
}

inline DagSpec dag(std::initializer_list<std::pair<const char*, Duration>> nodes,
                   std::initializer_list<std::pair<const char*, const char*>> edges, Duration deadline,
                   const char* id = "g") {
  DagSpec d;
  d.id = id;
  for (const auto& [n, c] : nodes) d.nodes.emplace(n, node(c));
  for (const auto& [a, b] : edges) d.edges.insert({a, b});
  d.deadline = deadline;
  return d;
}

/// A(20 s) -> B(20 s) -> C(40 s), D = 120 s.
inline DagSpec chain() {
  using red::from_seconds;
  return dag({{"A", from_seconds(20)}, {"B", from_seconds(20)}, {"C", from_seconds(40)}}, {{"A", "B"}, {"B", "C"}},
             from_seconds(120), "chain");
}

/// A -> {B, C} -> D with the given costs in ns.
inline DagSpec diamond(Duration a, Duration b, Duration c, Duration d, Duration deadline) {
  return dag({{"A", a}, {"B", b}, {"C", c}, {"D", d}}, {{"A", "B"}, {"A", "C"}, {"B", "D"}, {"C", "D"}}, deadline,
             "diamond");
}

/// Stage with an encoder/decoder decomposition.
inline NodeAttrs stage(Duration enc, std::initializer_list<Duration> decs, const char* encoder = "enc") {
  NodeAttrs a;
  a.enc_cost = enc;
  a.dec_costs = decs;
  Duration worst{};
  for (auto d : decs) worst = std::max(worst, d);
  a.wcet = enc + worst;
  a.encoder_ref = encoder;
  return a;
}

}  // namespace fixture
