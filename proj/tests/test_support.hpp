#pragma once

// Test-only oracles, independent of the library's algorithm choices:
// d-separation by exhaustive path enumeration, ancestor sets by directed
// path search, the truncated-factorization joint, and seeded random
// graph/model generators.

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "selbias/graph.hpp"
#include "selbias/rng.hpp"
#include "selbias/scm.hpp"

namespace oracle {

using selbias::Dag;
using selbias::NodeId;

inline std::set<NodeId> ancestors_by_paths(const Dag& g, const NodeId& v) {
  // u is an ancestor iff some directed path u -> ... -> v exists; walk all
  // simple paths backwards from v.
  std::set<NodeId> out{v};
  std::vector<NodeId> stack{v};
  auto rec = [&](auto&& self, const NodeId& cur) -> void {
    for (const NodeId& p : g.parents(cur)) {
      out.insert(p);
      if (std::find(stack.begin(), stack.end(), p) == stack.end()) {
        stack.push_back(p);
        self(self, p);
        stack.pop_back();
      }
    }
  };
  rec(rec, v);
  return out;
}

inline bool d_separated_by_paths(const Dag& g, const std::set<NodeId>& a,
                                 const std::set<NodeId>& b, const std::set<NodeId>& z) {
  std::set<std::pair<NodeId, NodeId>> eset;
  for (const auto& e : g.edges()) eset.insert(e);
  std::map<NodeId, std::set<NodeId>> adj;
  for (const auto& [p, c] : g.edges()) {
    adj[p].insert(c);
    adj[c].insert(p);
  }
  auto opened = [&](const NodeId& c) {
    const std::set<NodeId> de = selbias::descendants(g, c);
    for (const NodeId& zn : z)
      if (de.count(zn)) return true;
    return false;
  };
  auto path_active = [&](const std::vector<NodeId>& path) {
    for (std::size_t i = 1; i + 1 < path.size(); ++i) {
      const bool collider =
          eset.count({path[i - 1], path[i]}) && eset.count({path[i + 1], path[i]});
      if (collider) {
        if (!opened(path[i])) return false;
      } else {
        if (z.count(path[i])) return false;
      }
    }
    return true;
  };
  bool connected = false;
  std::vector<NodeId> path;
  auto rec = [&](auto&& self, const NodeId& cur) -> void {
    if (connected) return;
    for (const NodeId& next : adj[cur]) {
      if (std::find(path.begin(), path.end(), next) != path.end()) continue;
      if (a.count(next)) continue;
      path.push_back(next);
      if (b.count(next)) {
        if (path_active(path)) connected = true;
      } else {
        self(self, next);
      }
      path.pop_back();
      if (connected) return;
    }
  };
  for (const NodeId& s : a) {
    path = {s};
    rec(rec, s);
    if (connected) break;
  }
  return !connected;
}

// Interventional joint straight from the definition: keep the intervened
// variables clamped and multiply only the untouched factors.
inline double truncated_factor_mass(const selbias::DiscreteScm& m,
                                    const std::map<NodeId, int>& clamped,
                                    const std::vector<int>& bits) {
  const auto& vars = m.variables();
  double p = 1.0;
  for (std::size_t v = 0; v < vars.size(); ++v) {
    const auto it = clamped.find(vars[v]);
    if (it != clamped.end()) {
      if (bits[v] != it->second) return 0.0;
      continue;
    }
    std::uint32_t cfg = 0;
    for (int pp : m.parent_positions(static_cast<int>(v))) cfg = (cfg << 1) | bits[pp];
    const double t = m.threshold(static_cast<int>(v), cfg);
    p *= bits[v] ? t : 1.0 - t;
  }
  return p;
}

inline Dag random_dag(selbias::SplitMix64& rng, int max_nodes, double edge_prob = 0.4) {
  const int n = 2 + static_cast<int>(rng.next() % static_cast<std::uint64_t>(max_nodes - 1));
  std::vector<NodeId> nodes;
  for (int i = 0; i < n; ++i) nodes.push_back("V" + std::to_string(i));
  std::vector<std::pair<NodeId, NodeId>> edges;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (rng.next_unit() < edge_prob) edges.emplace_back(nodes[i], nodes[j]);
  return selbias::build_dag(nodes, edges);
}

inline selbias::DiscreteScm random_table_scm(const Dag& g, selbias::SplitMix64& rng) {
  std::map<NodeId, selbias::DiscreteScm::VariableDef> defs;
  for (const NodeId& v : g.nodes()) {
    const std::vector<NodeId> parents = g.parents(v);
    std::vector<double> rows(std::size_t{1} << parents.size());
    for (double& r : rows) r = 0.05 + 0.9 * rng.next_unit();
    defs[v] = {parents, selbias::Table{rows}};
  }
  return selbias::DiscreteScm::make(g, defs);
}

}  // namespace oracle
