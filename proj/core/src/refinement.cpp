#include "red/refinement.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <queue>
#include <tuple>

namespace red {

NodeId encoder_node_id(const NodeId& stage) { return stage + ".enc"; }
NodeId decoder_node_id(const NodeId& stage, std::size_t j) { return stage + ".dec" + std::to_string(j); }

RefinedStage refined_stage(const DagSpec& dag, const NodeId& stage) {
  auto it = dag.nodes.find(stage);
  if (it == dag.nodes.end()) throw Error(ErrorCode::NotRefinable, stage + ": no such node");
  const auto& a = it->second;
  if (!a.refinable()) throw Error(ErrorCode::NotRefinable, stage + ": no encoder/decoder decomposition");
  RefinedStage out;
  out.origin = stage;
  out.encoder = encoder_node_id(stage);
  out.encoder_cost = *a.enc_cost;
  for (std::size_t j = 0; j < a.dec_costs.size(); ++j) out.decoders.emplace_back(decoder_node_id(stage, j), a.dec_costs[j]);
  return out;
}

DagSpec refine(const DagSpec& dag, const NodeId& stage) {
  RefinedStage rs = refined_stage(dag, stage);
  const NodeAttrs& a = dag.nodes.at(stage);

  DagSpec out;
  out.id = dag.id;
  out.deadline = dag.deadline;
  out.arrival = dag.arrival;
  out.nodes = dag.nodes;
  out.nodes.erase(stage);

  auto add = [&](const NodeId& id, NodeAttrs attrs) {
    if (!out.nodes.emplace(id, std::move(attrs)).second) {
      throw Error(ErrorCode::NotRefinable, stage + ": refined node " + id + " already exists");
    }
  };
  NodeAttrs enc;
  enc.wcet = rs.encoder_cost;
  enc.mem_mb = a.mem_mb;
  enc.kind = NodeKind::Partitionable;
  enc.role = NodeRole::SharedEncoder;
  enc.next_release = a.next_release;
  enc.encoder_ref = a.encoder_ref.value_or(stage);
  add(rs.encoder, std::move(enc));
  for (const auto& [id, cost] : rs.decoders) {
    NodeAttrs dec;
    dec.wcet = cost;
    dec.kind = NodeKind::Partitionable;
    dec.role = NodeRole::Decoder;
    dec.next_release = a.next_release;
    add(id, std::move(dec));
    out.edges.insert({rs.encoder, id});
  }

  for (const auto& e : dag.edges) {
    if (e.to == stage) {
      out.edges.insert({e.from, rs.encoder});
    } else if (e.from == stage) {
      for (const auto& d : rs.decoders) out.edges.insert({d.first, e.to});
    } else {
      out.edges.insert(e);
    }
  }
  return out;
}

DagSpec refine_all(const DagSpec& dag) {
  DagSpec out = dag;
  for (const auto& [id, attrs] : dag.nodes) {
    if (attrs.refinable()) out = refine(out, id);
  }
  return out;
}

Duration serialization_margin(const RefinedStage& stage, double rho) {
  if (stage.decoders.empty()) return Duration::zero();
  const auto q = stage.decoders.size();
  if (rho >= static_cast<double>(q)) return Duration::zero();

  std::vector<Duration> costs;
  for (const auto& d : stage.decoders) costs.push_back(d.second);
  std::sort(costs.begin(), costs.end(), std::greater<>());
  const Duration sum = std::accumulate(costs.begin(), costs.end(), Duration::zero());
  const Duration max = costs.front();

  const auto slots = static_cast<std::size_t>(std::max(1.0, std::floor(rho)));
  std::priority_queue<Duration, std::vector<Duration>, std::greater<>> loads;
  for (std::size_t s = 0; s < slots; ++s) loads.push(Duration::zero());
  Duration makespan{};
  for (auto c : costs) {
    Duration l = loads.top() + c;
    loads.pop();
    loads.push(l);
    makespan = std::max(makespan, l);
  }
  return std::min(makespan - max, sum - max);
}

std::vector<MergeUnit> dynamic_merge(std::vector<FrontierItem> frontier, Duration gamma) {
  std::sort(frontier.begin(), frontier.end(), [](const FrontierItem& a, const FrontierItem& b) {
    return std::tie(a.encoder, a.height, a.predicted_release, a.id) <
           std::tie(b.encoder, b.height, b.predicted_release, b.id);
  });

  std::vector<MergeUnit> units;
  const FrontierItem* anchor = nullptr;
  for (const auto& item : frontier) {
    const bool joins = anchor != nullptr && !item.encoder.empty() && item.encoder == anchor->encoder &&
                       item.height == anchor->height && item.predicted_release - anchor->predicted_release <= gamma;
    if (joins) {
      auto& u = units.back();
      u.members.push_back(item.id);
      u.unit_deadline = std::min(u.unit_deadline, item.subdeadline);
      continue;
    }
    units.push_back({{item.id}, item.encoder, item.subdeadline, item.encoder.empty() ? 0 : 1});
    anchor = item.encoder.empty() ? nullptr : &item;
  }
  for (auto& u : units) std::sort(u.members.begin(), u.members.end());
  std::sort(units.begin(), units.end(), [](const MergeUnit& a, const MergeUnit& b) {
    return std::tie(a.unit_deadline, a.members.front()) < std::tie(b.unit_deadline, b.members.front());
  });
  return units;
}

}  // namespace red
