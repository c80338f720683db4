#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "red/common.hpp"

namespace red {

enum class NodeKind { Partitionable, Atomic };
enum class NodeRole { SharedEncoder, Decoder, Ordinary };

std::string_view to_string(NodeKind kind);
std::string_view to_string(NodeRole role);

/// Per-node attribute tuple: cost, footprint, partitionability, MIMONet role
/// and predicted next release.
struct NodeAttrs {
  Duration wcet{};
  double mem_mb = 0.0;
  NodeKind kind = NodeKind::Partitionable;
  NodeRole role = NodeRole::Ordinary;
  Duration next_release{};
  /// Physical shared-encoder weights used by this node. Required for
  /// SharedEncoder nodes and for refinable stages (which name the weights
  /// their encoder will use once split).
  std::optional<std::string> encoder_ref;
  /// Encoder/decoder decomposition of a refinable MIMONet stage.
  std::optional<Duration> enc_cost;
  std::vector<Duration> dec_costs;

  [[nodiscard]] bool refinable() const noexcept {
    return kind == NodeKind::Partitionable && enc_cost.has_value() && !dec_costs.empty();
  }

  friend bool operator==(const NodeAttrs&, const NodeAttrs&) = default;
};

struct Edge {
  NodeId from;
  NodeId to;

  friend auto operator<=>(const Edge&, const Edge&) = default;
  friend bool operator==(const Edge&, const Edge&) = default;
};

/// A DAG task: nodes, precedence edges (from precedes to), relative
/// end-to-end deadline and absolute arrival.
struct DagSpec {
  DagId id;
  std::map<NodeId, NodeAttrs> nodes;
  std::set<Edge> edges;
  Duration deadline{};
  TimePoint arrival{};

  [[nodiscard]] std::vector<NodeId> predecessors(const NodeId& node) const;
  [[nodiscard]] std::vector<NodeId> successors(const NodeId& node) const;

  friend bool operator==(const DagSpec&, const DagSpec&) = default;
};

struct AddNode {
  NodeId node;
  NodeAttrs attrs;
  std::vector<NodeId> preds;
  std::vector<NodeId> succs;
  friend bool operator==(const AddNode&, const AddNode&) = default;
};
struct RemoveNode {
  NodeId node;
  friend bool operator==(const RemoveNode&, const RemoveNode&) = default;
};
struct AddEdge {
  NodeId from;
  NodeId to;
  friend bool operator==(const AddEdge&, const AddEdge&) = default;
};
struct RemoveEdge {
  NodeId from;
  NodeId to;
  friend bool operator==(const RemoveEdge&, const RemoveEdge&) = default;
};

using MutationOp = std::variant<AddNode, RemoveNode, AddEdge, RemoveEdge>;

struct Mutation {
  TimePoint at{};
  DagId target_dag;
  MutationOp op;
  friend bool operator==(const Mutation&, const Mutation&) = default;
};

std::string describe(const MutationOp& op);

/// Checks every DagSpec invariant; throws Error (CycleError for cycles).
void validate(const DagSpec& dag);
/// Checks a single node's attribute invariants.
void validate_node(const NodeId& id, const NodeAttrs& attrs);

std::map<NodeId, int> heights(const DagSpec& dag);
std::vector<std::set<NodeId>> level_sets(const DagSpec& dag);
Duration critical_path_cost(const DagSpec& dag);

/// Returns a new DAG with the mutation applied. Throws
/// MutationBreaksInvariant if the result would be invalid.
DagSpec apply_mutation(const DagSpec& dag, const Mutation& m);

/// Dense, index-based view of a DagSpec. Node indices follow lexicographic
/// id order, so every traversal is deterministic.
class Topology {
 public:
  using Index = std::uint32_t;

  /// Builds the index. Throws on dangling edges, self-loops and cycles.
  explicit Topology(const DagSpec& dag);

  [[nodiscard]] std::size_t size() const noexcept { return ids_.size(); }
  [[nodiscard]] std::size_t edge_count() const noexcept { return succ_.size(); }
  [[nodiscard]] const NodeId& id(Index i) const { return ids_[i]; }
  [[nodiscard]] const std::vector<NodeId>& ids() const noexcept { return ids_; }
  [[nodiscard]] std::optional<Index> index_of(const NodeId& id) const;

  [[nodiscard]] std::span<const Index> preds(Index i) const {
    return {pred_.data() + pred_off_[i], pred_.data() + pred_off_[i + 1]};
  }
  [[nodiscard]] std::span<const Index> succs(Index i) const {
    return {succ_.data() + succ_off_[i], succ_.data() + succ_off_[i + 1]};
  }
  /// Topological order (Kahn's algorithm, FIFO seeded in index order).
  [[nodiscard]] const std::vector<Index>& order() const noexcept { return order_; }
  /// Longest-path depth from the sources.
  [[nodiscard]] const std::vector<int>& heights() const noexcept { return heights_; }
  [[nodiscard]] int max_height() const noexcept { return max_height_; }

 private:
  std::vector<NodeId> ids_;
  std::vector<std::size_t> pred_off_, succ_off_;
  std::vector<Index> pred_, succ_;
  std::vector<Index> order_;
  std::vector<int> heights_;
  int max_height_ = -1;
};

/// Longest source-to-sink path cost in O(|V|+|E|); costs indexed like topo.
Duration critical_path_cost(const Topology& topo, std::span<const Duration> costs);

}  // namespace red
