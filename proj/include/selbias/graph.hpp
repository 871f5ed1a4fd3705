#pragma once

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "selbias/error.hpp"

namespace selbias {

/// Node names are bare tokens (letters, digits, underscore). Names of the
/// form `base@suffix` are reserved for counterfactual copies created by
/// swig() and cannot be declared directly.
using NodeId = std::string;

bool is_bare_node_name(const NodeId& name);

/// Immutable directed acyclic graph over named nodes. All accessors iterate
/// in lexicographic node order; the cached topological order breaks ties
/// lexicographically, so every derived output is reproducible.
class Dag {
 public:
  Dag() = default;

  std::size_t node_count() const { return names_.size(); }
  std::size_t edge_count() const { return edge_count_; }
  const std::vector<NodeId>& nodes() const { return names_; }
  const std::vector<NodeId>& topo_order() const { return topo_; }

  bool has_node(const NodeId& v) const;
  bool has_edge(const NodeId& parent, const NodeId& child) const;
  std::vector<NodeId> parents(const NodeId& v) const;
  std::vector<NodeId> children(const NodeId& v) const;
  std::vector<std::pair<NodeId, NodeId>> edges() const;

  bool operator==(const Dag& other) const;

  // Index-level view used by the algorithms; indices are positions in the
  // lexicographically sorted node list.
  int index_of(const NodeId& v) const;
  const std::vector<int>& parent_indices(int v) const { return parents_[v]; }
  const std::vector<int>& child_indices(int v) const { return children_[v]; }
  const NodeId& name_of(int v) const { return names_[v]; }

  enum class NameRule { bare, any };
  static Dag make(const std::vector<NodeId>& nodes,
                  const std::vector<std::pair<NodeId, NodeId>>& edges,
                  NameRule rule);

 private:
  std::vector<NodeId> names_;                  // sorted
  std::vector<std::vector<int>> parents_;      // sorted index lists
  std::vector<std::vector<int>> children_;
  std::vector<NodeId> topo_;
  std::size_t edge_count_ = 0;
};

/// Validates names, rejects cycles (naming one), duplicate nodes/edges,
/// self-loops and undeclared endpoints.
Dag build_dag(const std::vector<NodeId>& nodes,
              const std::vector<std::pair<NodeId, NodeId>>& edges);

/// Inclusive ancestor set An(v): contains v itself.
std::set<NodeId> ancestors(const Dag& g, const NodeId& v);

/// Inclusive descendant set.
std::set<NodeId> descendants(const Dag& g, const NodeId& v);

/// Induced subgraph on g.nodes minus `removed`; edges touching removed
/// nodes are dropped.
Dag subgraph_removing(const Dag& g, const std::set<NodeId>& removed);

/// Exact d-separation decided by linear-time reachability over
/// (node, travel direction) states. a and b must be non-empty; a, b, z
/// pairwise disjoint. A collider is open iff it is in z or has a
/// descendant in z.
bool d_separated(const Dag& g, const std::set<NodeId>& a,
                 const std::set<NodeId>& b, const std::set<NodeId>& z);

/// A causal DAG augmented with one sink selection node. graph() is the
/// full augmented DAG G_s; causal_graph() strips the selection node.
class SelectionDag {
 public:
  static SelectionDag make(Dag graph_with_selection, NodeId selection);

  const Dag& graph() const { return graph_; }
  const NodeId& selection() const { return selection_; }
  Dag causal_graph() const;

 private:
  SelectionDag(Dag g, NodeId s) : graph_(std::move(g)), selection_(std::move(s)) {}
  Dag graph_;
  NodeId selection_;
};

/// Adds a selection node named "S" with the given parents.
SelectionDag with_selection(const Dag& g, const std::set<NodeId>& parents_of_s);

/// Node-split intervention graph. The random half keeps the original
/// incoming edges of the split node and loses its outgoing edges; the
/// fixed half `x@fixed` has no parents and inherits the outgoing edges.
/// Exactly the strict descendants of the split node are relabeled `d@x`.
struct Swig {
  Dag graph;
  NodeId random_half;
  NodeId fixed_half;
  std::map<NodeId, NodeId> relabeling;
};

Swig swig(const Dag& g, const NodeId& x);

std::string format_node_set(const std::set<NodeId>& s);

}  // namespace selbias
