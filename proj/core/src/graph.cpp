#include "red/graph.hpp"

#include <algorithm>

namespace red {

std::string_view to_string(NodeKind kind) {
  return kind == NodeKind::Atomic ? "Atomic" : "Partitionable";
}

std::string_view to_string(NodeRole role) {
  switch (role) {
    case NodeRole::SharedEncoder: return "SharedEncoder";
    case NodeRole::Decoder: return "Decoder";
    case NodeRole::Ordinary: return "Ordinary";
  }
  return "Ordinary";
}

std::vector<NodeId> DagSpec::predecessors(const NodeId& node) const {
  std::vector<NodeId> out;
  for (const auto& e : edges) {
    if (e.to == node) out.push_back(e.from);
  }
  return out;
}

std::vector<NodeId> DagSpec::successors(const NodeId& node) const {
  std::vector<NodeId> out;
  auto it = edges.lower_bound(Edge{node, {}});
  for (; it != edges.end() && it->from == node; ++it) out.push_back(it->to);
  return out;
}

std::string describe(const MutationOp& op) {
  struct Visitor {
    std::string operator()(const AddNode& a) const { return "AddNode(" + a.node + ")"; }
    std::string operator()(const RemoveNode& r) const { return "RemoveNode(" + r.node + ")"; }
    std::string operator()(const AddEdge& a) const { return "AddEdge(" + a.from + "," + a.to + ")"; }
    std::string operator()(const RemoveEdge& r) const {
      return "RemoveEdge(" + r.from + "," + r.to + ")";
    }
  };
  return std::visit(Visitor{}, op);
}

void validate_node(const NodeId& id, const NodeAttrs& a) {
  auto fail = [&](const std::string& why) { throw Error(ErrorCode::InvalidNode, id + ": " + why); };
  if (id.empty()) fail("empty node id");
  if (a.wcet <= Duration::zero()) fail("wcet must be positive");
  if (!(a.mem_mb >= 0.0)) fail("mem must be non-negative");
  if (a.next_release < Duration::zero()) fail("next_release must be non-negative");
  if (a.role == NodeRole::SharedEncoder && !a.encoder_ref) fail("SharedEncoder requires encoder_ref");
  if (a.encoder_ref && a.role != NodeRole::SharedEncoder && !a.enc_cost) {
    fail("encoder_ref is only allowed on SharedEncoder nodes or refinable stages");
  }
  if (a.enc_cost) {
    if (*a.enc_cost <= Duration::zero()) fail("enc_cost must be positive");
    if (!a.dec_costs.empty()) {
      Duration max_dec{};
      for (auto d : a.dec_costs) {
        if (d <= Duration::zero()) fail("dec_costs must be positive");
        max_dec = std::max(max_dec, d);
      }
      if (*a.enc_cost + max_dec > a.wcet) fail("enc_cost + max(dec_costs) exceeds wcet");
    }
  } else if (!a.dec_costs.empty()) {
    fail("dec_costs given without enc_cost");
  }
}

void validate(const DagSpec& dag) {
  if (dag.nodes.empty()) throw Error(ErrorCode::EmptyDag, "DAG '" + dag.id + "' has no nodes");
  if (dag.deadline <= Duration::zero()) {
    throw Error(ErrorCode::NonPositiveDeadline, "DAG '" + dag.id + "' deadline must be positive");
  }
  for (const auto& [id, attrs] : dag.nodes) validate_node(id, attrs);
  // Endpoint and acyclicity checks; a non-empty acyclic graph always has at
  // least one source and one sink.
  Topology topo(dag);
  (void)topo;
}

Topology::Topology(const DagSpec& dag) {
  ids_.reserve(dag.nodes.size());
  for (const auto& [id, _] : dag.nodes) ids_.push_back(id);
  const std::size_t n = ids_.size();

  std::vector<std::size_t> indeg(n, 0), outdeg(n, 0);
  std::vector<std::pair<Index, Index>> pairs;
  pairs.reserve(dag.edges.size());
  for (const auto& e : dag.edges) {
    auto u = index_of(e.from);
    auto v = index_of(e.to);
    if (!u || !v) {
      throw Error(ErrorCode::DanglingEdge, "edge " + e.from + " -> " + e.to + " references a missing node");
    }
    if (*u == *v) throw CycleError({e.from, e.from});
    pairs.emplace_back(*u, *v);
    ++outdeg[*u];
    ++indeg[*v];
  }

  succ_off_.assign(n + 1, 0);
  pred_off_.assign(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) {
    succ_off_[i + 1] = succ_off_[i] + outdeg[i];
    pred_off_[i + 1] = pred_off_[i] + indeg[i];
  }
  succ_.resize(pairs.size());
  pred_.resize(pairs.size());
  {
    std::vector<std::size_t> sfill(succ_off_.begin(), succ_off_.end() - 1);
    std::vector<std::size_t> pfill(pred_off_.begin(), pred_off_.end() - 1);
    // dag.edges is ordered by (from, to), so adjacency lists come out sorted.
    for (auto [u, v] : pairs) {
      succ_[sfill[u]++] = v;
      pred_[pfill[v]++] = u;
    }
  }

  order_.reserve(n);
  std::vector<std::size_t> remaining = indeg;
  for (Index i = 0; i < n; ++i) {
    if (remaining[i] == 0) order_.push_back(i);
  }
  for (std::size_t head = 0; head < order_.size(); ++head) {
    Index u = order_[head];
    for (Index v : succs(u)) {
      if (--remaining[v] == 0) order_.push_back(v);
    }
  }

  if (order_.size() != n) {
    // Every unprocessed node still has an unprocessed predecessor; walking
    // backwards must revisit a node.
    Index start = 0;
    while (remaining[start] == 0) ++start;
    std::vector<Index> walk{start};
    std::vector<int> seen_at(n, -1);
    seen_at[start] = 0;
    while (true) {
      Index cur = walk.back();
      Index next = cur;
      for (Index p : preds(cur)) {
        if (remaining[p] > 0) {
          next = p;
          break;
        }
      }
      if (seen_at[next] >= 0) {
        std::vector<NodeId> witness;
        for (std::size_t k = walk.size(); k-- > static_cast<std::size_t>(seen_at[next]);) {
          witness.push_back(ids_[walk[k]]);
        }
        witness.push_back(ids_[walk.back()]);
        throw CycleError(std::move(witness));
      }
      seen_at[next] = static_cast<int>(walk.size());
      walk.push_back(next);
    }
  }

  heights_.assign(n, 0);
  for (Index u : order_) {
    for (Index v : succs(u)) heights_[v] = std::max(heights_[v], heights_[u] + 1);
  }
  max_height_ = n == 0 ? -1 : *std::max_element(heights_.begin(), heights_.end());
}

std::optional<Topology::Index> Topology::index_of(const NodeId& id) const {
  auto it = std::lower_bound(ids_.begin(), ids_.end(), id);
  if (it == ids_.end() || *it != id) return std::nullopt;
  return static_cast<Index>(it - ids_.begin());
}

Duration critical_path_cost(const Topology& topo, std::span<const Duration> costs) {
  std::vector<Duration> finish(topo.size(), Duration::zero());
  Duration best{};
  for (auto u : topo.order()) {
    Duration start{};
    for (auto p : topo.preds(u)) start = std::max(start, finish[p]);
    finish[u] = start + costs[u];
    best = std::max(best, finish[u]);
  }
  return best;
}

std::map<NodeId, int> heights(const DagSpec& dag) {
  Topology topo(dag);
  std::map<NodeId, int> out;
  for (Topology::Index i = 0; i < topo.size(); ++i) out.emplace_hint(out.end(), topo.id(i), topo.heights()[i]);
  return out;
}

std::vector<std::set<NodeId>> level_sets(const DagSpec& dag) {
  Topology topo(dag);
  std::vector<std::set<NodeId>> levels(static_cast<std::size_t>(topo.max_height() + 1));
  for (Topology::Index i = 0; i < topo.size(); ++i) {
    levels[static_cast<std::size_t>(topo.heights()[i])].insert(topo.id(i));
  }
  return levels;
}

Duration critical_path_cost(const DagSpec& dag) {
  Topology topo(dag);
  std::vector<Duration> costs;
  costs.reserve(topo.size());
  for (const auto& [_, attrs] : dag.nodes) costs.push_back(attrs.wcet);
  return critical_path_cost(topo, costs);
}

namespace {

[[noreturn]] void broken(const Mutation& m, const std::string& why) {
  throw Error(ErrorCode::MutationBreaksInvariant, describe(m.op) + ": " + why);
}

}  // namespace

DagSpec apply_mutation(const DagSpec& dag, const Mutation& m) {
  if (!m.target_dag.empty() && m.target_dag != dag.id) broken(m, "targets DAG '" + m.target_dag + "'");
  DagSpec out = dag;
  auto has = [&](const NodeId& n) { return out.nodes.count(n) > 0; };

  if (const auto* add = std::get_if<AddNode>(&m.op)) {
    if (has(add->node)) broken(m, "node already exists");
    out.nodes.emplace(add->node, add->attrs);
    for (const auto& p : add->preds) {
      if (!has(p)) broken(m, "missing predecessor " + p);
      out.edges.insert({p, add->node});
    }
    for (const auto& s : add->succs) {
      if (!has(s)) broken(m, "missing successor " + s);
      out.edges.insert({add->node, s});
    }
  } else if (const auto* rm = std::get_if<RemoveNode>(&m.op)) {
    if (!has(rm->node)) broken(m, "no such node");
    out.nodes.erase(rm->node);
    std::erase_if(out.edges, [&](const Edge& e) { return e.from == rm->node || e.to == rm->node; });
  } else if (const auto* ae = std::get_if<AddEdge>(&m.op)) {
    if (!has(ae->from) || !has(ae->to)) broken(m, "endpoint missing");
    if (!out.edges.insert({ae->from, ae->to}).second) broken(m, "edge already present");
  } else if (const auto* re = std::get_if<RemoveEdge>(&m.op)) {
    if (out.edges.erase({re->from, re->to}) == 0) broken(m, "no such edge");
  }

  try {
    validate(out);
  } catch (const Error& e) {
    broken(m, e.what());
  }
  return out;
}

}  // namespace red
