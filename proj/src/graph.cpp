#include "selbias/graph.hpp"

#include <algorithm>
#include <array>
#include <deque>
#include <queue>
#include <sstream>

namespace selbias {

bool is_bare_node_name(const NodeId& name) {
  if (name.empty()) return false;
  for (char c : name) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                    (c >= '0' && c <= '9') || c == '_';
    if (!ok) return false;
  }
  return true;
}

namespace {

bool is_counterfactual_name(const NodeId& name) {
  auto at = name.find('@');
  if (at == NodeId::npos || at == 0 || at + 1 == name.size()) return false;
  return is_bare_node_name(name.substr(0, at)) && is_bare_node_name(name.substr(at + 1));
}

// Names a directed cycle for the CycleDetected message: "a -> b -> a".
std::string find_cycle(const std::vector<NodeId>& names,
                       const std::vector<std::vector<int>>& children,
                       const std::vector<char>& in_cycle_region) {
  const int n = static_cast<int>(names.size());
  std::vector<int> state(n, 0);  // 0 unvisited, 1 on stack, 2 done
  std::vector<int> stack, pos_on_stack(n, -1);
  std::string out;
  auto dfs = [&](auto&& self, int v) -> bool {
    state[v] = 1;
    pos_on_stack[v] = static_cast<int>(stack.size());
    stack.push_back(v);
    for (int c : children[v]) {
      if (!in_cycle_region[c]) continue;
      if (state[c] == 1) {
        std::ostringstream os;
        for (std::size_t i = pos_on_stack[c]; i < stack.size(); ++i)
          os << names[stack[i]] << " -> ";
        os << names[c];
        out = os.str();
        return true;
      }
      if (state[c] == 0 && self(self, c)) return true;
    }
    stack.pop_back();
    pos_on_stack[v] = -1;
    state[v] = 2;
    return false;
  };
  for (int v = 0; v < n; ++v)
    if (in_cycle_region[v] && state[v] == 0 && dfs(dfs, v)) break;
  return out;
}

}  // namespace

Dag Dag::make(const std::vector<NodeId>& nodes,
              const std::vector<std::pair<NodeId, NodeId>>& edges, NameRule rule) {
  Dag g;
  g.names_ = nodes;
  std::sort(g.names_.begin(), g.names_.end());
  for (std::size_t i = 0; i + 1 < g.names_.size(); ++i)
    if (g.names_[i] == g.names_[i + 1])
      fail(Errc::duplicate_node, "node '" + g.names_[i] + "' declared twice");
  for (const NodeId& v : g.names_) {
    const bool ok = rule == NameRule::bare ? is_bare_node_name(v)
                                           : (is_bare_node_name(v) || is_counterfactual_name(v));
    if (!ok) fail(Errc::invalid_name, "invalid node name '" + v + "'");
  }

  const int n = static_cast<int>(g.names_.size());
  g.parents_.assign(n, {});
  g.children_.assign(n, {});
  auto index = [&](const NodeId& v) {
    auto it = std::lower_bound(g.names_.begin(), g.names_.end(), v);
    if (it == g.names_.end() || *it != v)
      fail(Errc::unknown_endpoint, "edge endpoint '" + v + "' is not a declared node");
    return static_cast<int>(it - g.names_.begin());
  };
  for (const auto& [p, c] : edges) {
    const int pi = index(p), ci = index(c);
    if (pi == ci) fail(Errc::duplicate_edge, "self-loop on '" + p + "'");
    g.children_[pi].push_back(ci);
    g.parents_[ci].push_back(pi);
  }
  for (int v = 0; v < n; ++v) {
    std::sort(g.children_[v].begin(), g.children_[v].end());
    std::sort(g.parents_[v].begin(), g.parents_[v].end());
    if (std::adjacent_find(g.children_[v].begin(), g.children_[v].end()) != g.children_[v].end())
      fail(Errc::duplicate_edge, "duplicate edge out of '" + g.names_[v] + "'");
    g.edge_count_ += g.children_[v].size();
  }

  // Kahn with a min-index heap: deterministic topological order.
  std::vector<int> indegree(n);
  for (int v = 0; v < n; ++v) indegree[v] = static_cast<int>(g.parents_[v].size());
  std::priority_queue<int, std::vector<int>, std::greater<>> ready;
  for (int v = 0; v < n; ++v)
    if (indegree[v] == 0) ready.push(v);
  std::vector<int> order;
  while (!ready.empty()) {
    const int v = ready.top();
    ready.pop();
    order.push_back(v);
    for (int c : g.children_[v])
      if (--indegree[c] == 0) ready.push(c);
  }
  if (static_cast<int>(order.size()) != n) {
    std::vector<char> leftover(n, 0);
    for (int v = 0; v < n; ++v) leftover[v] = indegree[v] > 0;
    fail(Errc::cycle_detected, "cycle: " + find_cycle(g.names_, g.children_, leftover));
  }
  g.topo_.reserve(n);
  for (int v : order) g.topo_.push_back(g.names_[v]);
  return g;
}

Dag build_dag(const std::vector<NodeId>& nodes,
              const std::vector<std::pair<NodeId, NodeId>>& edges) {
  return Dag::make(nodes, edges, Dag::NameRule::bare);
}

bool Dag::has_node(const NodeId& v) const {
  return std::binary_search(names_.begin(), names_.end(), v);
}

int Dag::index_of(const NodeId& v) const {
  auto it = std::lower_bound(names_.begin(), names_.end(), v);
  if (it == names_.end() || *it != v) fail(Errc::unknown_node, "unknown node '" + v + "'");
  return static_cast<int>(it - names_.begin());
}

bool Dag::has_edge(const NodeId& parent, const NodeId& child) const {
  const int p = index_of(parent), c = index_of(child);
  return std::binary_search(children_[p].begin(), children_[p].end(), c);
}

std::vector<NodeId> Dag::parents(const NodeId& v) const {
  std::vector<NodeId> out;
  for (int p : parents_[index_of(v)]) out.push_back(names_[p]);
  return out;
}

std::vector<NodeId> Dag::children(const NodeId& v) const {
  std::vector<NodeId> out;
  for (int c : children_[index_of(v)]) out.push_back(names_[c]);
  return out;
}

std::vector<std::pair<NodeId, NodeId>> Dag::edges() const {
  std::vector<std::pair<NodeId, NodeId>> out;
  for (std::size_t v = 0; v < names_.size(); ++v)
    for (int c : children_[v]) out.emplace_back(names_[v], names_[c]);
  return out;
}

bool Dag::operator==(const Dag& other) const {
  return names_ == other.names_ && parents_ == other.parents_;
}

namespace {

std::set<NodeId> closure(const Dag& g, const NodeId& start, bool upward) {
  std::set<NodeId> out;
  std::vector<int> todo{g.index_of(start)};
  std::vector<char> seen(g.node_count(), 0);
  seen[todo[0]] = 1;
  while (!todo.empty()) {
    const int v = todo.back();
    todo.pop_back();
    out.insert(g.name_of(v));
    for (int w : upward ? g.parent_indices(v) : g.child_indices(v))
      if (!seen[w]) {
        seen[w] = 1;
        todo.push_back(w);
      }
  }
  return out;
}

}  // namespace

std::set<NodeId> ancestors(const Dag& g, const NodeId& v) { return closure(g, v, true); }
std::set<NodeId> descendants(const Dag& g, const NodeId& v) { return closure(g, v, false); }

Dag subgraph_removing(const Dag& g, const std::set<NodeId>& removed) {
  for (const NodeId& v : removed) g.index_of(v);  // validates
  std::vector<NodeId> nodes;
  for (const NodeId& v : g.nodes())
    if (!removed.count(v)) nodes.push_back(v);
  std::vector<std::pair<NodeId, NodeId>> edges;
  for (const auto& e : g.edges())
    if (!removed.count(e.first) && !removed.count(e.second)) edges.push_back(e);
  return Dag::make(nodes, edges, Dag::NameRule::any);
}

bool d_separated(const Dag& g, const std::set<NodeId>& a, const std::set<NodeId>& b,
                 const std::set<NodeId>& z) {
  if (a.empty() || b.empty()) fail(Errc::invalid_query, "d-separation endpoints must be non-empty");
  const int n = static_cast<int>(g.node_count());
  std::vector<char> in_a(n, 0), in_b(n, 0), in_z(n, 0);
  for (const NodeId& v : a) in_a[g.index_of(v)] = 1;
  for (const NodeId& v : b) in_b[g.index_of(v)] = 1;
  for (const NodeId& v : z) in_z[g.index_of(v)] = 1;
  for (int v = 0; v < n; ++v)
    if (in_a[v] + in_b[v] + in_z[v] > 1)
      fail(Errc::overlapping_sets, "sets overlap at '" + g.name_of(v) + "'");

  // z_anc marks z together with its ancestors; a collider on a trail is
  // traversable exactly when it carries this mark.
  std::vector<char> z_anc(n, 0);
  {
    std::vector<int> todo;
    for (int v = 0; v < n; ++v)
      if (in_z[v]) {
        z_anc[v] = 1;
        todo.push_back(v);
      }
    while (!todo.empty()) {
      const int v = todo.back();
      todo.pop_back();
      for (int p : g.parent_indices(v))
        if (!z_anc[p]) {
          z_anc[p] = 1;
          todo.push_back(p);
        }
    }
  }

  // Reachability over (node, direction): FROM_CHILD means the trail enters
  // the node against an outgoing edge, FROM_PARENT along an incoming edge.
  enum { FROM_CHILD = 0, FROM_PARENT = 1 };
  std::vector<std::array<char, 2>> visited(n, {0, 0});
  std::deque<std::pair<int, int>> queue;
  for (int v = 0; v < n; ++v)
    if (in_a[v]) queue.emplace_back(v, FROM_CHILD);
  while (!queue.empty()) {
    const auto [v, dir] = queue.front();
    queue.pop_front();
    if (visited[v][dir]) continue;
    visited[v][dir] = 1;
    if (in_b[v]) return false;
    if (dir == FROM_CHILD && !in_z[v]) {
      for (int p : g.parent_indices(v)) queue.emplace_back(p, FROM_CHILD);
      for (int c : g.child_indices(v)) queue.emplace_back(c, FROM_PARENT);
    } else if (dir == FROM_PARENT) {
      if (!in_z[v])
        for (int c : g.child_indices(v)) queue.emplace_back(c, FROM_PARENT);
      if (z_anc[v])
        for (int p : g.parent_indices(v)) queue.emplace_back(p, FROM_CHILD);
    }
  }
  return true;
}

SelectionDag SelectionDag::make(Dag graph_with_selection, NodeId selection) {
  const Dag& g = graph_with_selection;
  const int s = g.index_of(selection);
  if (!g.child_indices(s).empty())
    fail(Errc::invalid_query, "selection node '" + selection + "' must be a sink");
  if (g.parent_indices(s).empty())
    fail(Errc::invalid_query, "selection node '" + selection + "' needs at least one parent");
  return SelectionDag(std::move(graph_with_selection), std::move(selection));
}

Dag SelectionDag::causal_graph() const { return subgraph_removing(graph_, {selection_}); }

SelectionDag with_selection(const Dag& g, const std::set<NodeId>& parents_of_s) {
  if (parents_of_s.empty())
    fail(Errc::invalid_query, "selection node needs at least one parent");
  for (const NodeId& p : parents_of_s) g.index_of(p);
  if (g.has_node("S")) fail(Errc::name_clash, "node 'S' already exists");
  std::vector<NodeId> nodes = g.nodes();
  nodes.push_back("S");
  auto edges = g.edges();
  for (const NodeId& p : parents_of_s) edges.emplace_back(p, "S");
  return SelectionDag::make(Dag::make(nodes, edges, Dag::NameRule::any), "S");
}

Swig swig(const Dag& g, const NodeId& x) {
  g.index_of(x);
  Swig out;
  out.random_half = x;
  out.fixed_half = x + "@fixed";
  std::set<NodeId> strict_desc = descendants(g, x);
  strict_desc.erase(x);
  for (const NodeId& d : strict_desc) out.relabeling[d] = d + "@" + x;

  auto rename = [&](const NodeId& v) -> NodeId {
    auto it = out.relabeling.find(v);
    return it == out.relabeling.end() ? v : it->second;
  };
  std::vector<NodeId> nodes{out.fixed_half};
  for (const NodeId& v : g.nodes()) nodes.push_back(rename(v));
  std::vector<std::pair<NodeId, NodeId>> edges;
  for (const auto& [p, c] : g.edges()) {
    if (p == x)
      edges.emplace_back(out.fixed_half, rename(c));
    else
      edges.emplace_back(rename(p), rename(c));
  }
  out.graph = Dag::make(nodes, edges, Dag::NameRule::any);
  return out;
}

std::string format_node_set(const std::set<NodeId>& s) {
  std::string out = "{";
  bool first = true;
  for (const NodeId& v : s) {
    if (!first) out += ", ";
    out += v;
    first = false;
  }
  return out + "}";
}

}  // namespace selbias
