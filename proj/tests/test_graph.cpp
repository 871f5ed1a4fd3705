#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <functional>

#include "selbias/fixtures.hpp"
#include "selbias/graph.hpp"
#include "test_support.hpp"

using namespace selbias;

namespace {

bool fails_with(Errc code, const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code() == code;
  }
  return false;
}

}  // namespace

TEST_CASE("two-node chain builds with the obvious order") {
  const Dag g = build_dag({"X", "Y"}, {{"X", "Y"}});
  CHECK(g.node_count() == 2);
  CHECK(g.topo_order() == std::vector<NodeId>{"X", "Y"});
  CHECK(g.has_edge("X", "Y"));
  CHECK_FALSE(g.has_edge("Y", "X"));
}

TEST_CASE("a two-cycle is rejected and named") {
  try {
    build_dag({"X", "Y"}, {{"X", "Y"}, {"Y", "X"}});
    FAIL("cycle not detected");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::cycle_detected);
    CHECK(std::string(e.what()).find("X") != std::string::npos);
    CHECK(std::string(e.what()).find("Y") != std::string::npos);
  }
}

TEST_CASE("construction rejects malformed input") {
  CHECK(fails_with(Errc::duplicate_node, [] { build_dag({"X", "X"}, {}); }));
  CHECK(fails_with(Errc::duplicate_edge, [] {
    build_dag({"X", "Y"}, {{"X", "Y"}, {"X", "Y"}});
  }));
  CHECK(fails_with(Errc::duplicate_edge, [] { build_dag({"X"}, {{"X", "X"}}); }));
  CHECK(fails_with(Errc::unknown_endpoint, [] { build_dag({"X"}, {{"X", "Y"}}); }));
  CHECK(fails_with(Errc::invalid_name, [] { build_dag({"bad name"}, {}); }));
  CHECK(fails_with(Errc::invalid_name, [] { build_dag({"a@b"}, {}); }));
  CHECK(fails_with(Errc::invalid_name, [] { build_dag({""}, {}); }));
}

TEST_CASE("the eight-node accident graph builds") {
  const Dag g = fixtures::accident_graph();
  CHECK(g.node_count() == 8);
  CHECK(g.edge_count() == 15);
  CHECK(g.has_edge("A", "A_sev"));  // severe accident requires an accident
}

TEST_CASE("ancestor sets are inclusive") {
  const SelectionDag a = fixtures::dag_a();
  CHECK(ancestors(a.graph(), "S") == std::set<NodeId>{"S", "W", "X", "Y"});

  const Dag iso = build_dag({"U", "V"}, {});
  CHECK(ancestors(iso, "V") == std::set<NodeId>{"V"});

  const SelectionDag c = fixtures::dag_c();
  CHECK(ancestors(c.graph(), "S") == std::set<NodeId>{"M", "S", "W", "X"});

  CHECK(fails_with(Errc::unknown_node, [&] { ancestors(iso, "Q"); }));
}

TEST_CASE("vertex-deleted subgraphs") {
  const SelectionDag a = fixtures::dag_a();
  CHECK(subgraph_removing(a.graph(), {}) == a.graph());

  const Dag cut = subgraph_removing(a.graph(), {"X"});
  CHECK(cut.nodes() == std::vector<NodeId>{"S", "W", "Y"});
  CHECK(cut.edges() ==
        std::vector<std::pair<NodeId, NodeId>>{{"W", "Y"}, {"Y", "S"}});

  std::set<NodeId> all(a.graph().nodes().begin(), a.graph().nodes().end());
  CHECK(subgraph_removing(a.graph(), all).node_count() == 0);
  CHECK(fails_with(Errc::unknown_node, [&] { subgraph_removing(a.graph(), {"Q"}); }));
}

TEST_CASE("d-separation on the selection examples") {
  const Dag a = fixtures::dag_a().graph();
  CHECK(d_separated(a, {"X"}, {"S"}, {"Y", "W"}));

  const Dag b = fixtures::dag_b().graph();
  CHECK_FALSE(d_separated(b, {"X"}, {"S"}, {"Y", "W"}));
  CHECK_FALSE(d_separated(b, {"Y"}, {"S"}, {"X", "W"}));

  const Dag chain = build_dag({"X", "Y", "S"}, {{"X", "Y"}, {"Y", "S"}});
  CHECK(d_separated(chain, {"X"}, {"S"}, {"Y"}));
  CHECK_FALSE(d_separated(chain, {"X"}, {"S"}, {}));
}

TEST_CASE("d-separation validates its sets") {
  const Dag g = build_dag({"X", "Y", "Z"}, {{"X", "Y"}});
  CHECK(fails_with(Errc::overlapping_sets, [&] { d_separated(g, {"X"}, {"X"}, {}); }));
  CHECK(fails_with(Errc::overlapping_sets, [&] { d_separated(g, {"X"}, {"Y"}, {"X"}); }));
  CHECK(fails_with(Errc::unknown_node, [&] { d_separated(g, {"Q"}, {"Y"}, {}); }));
  CHECK(fails_with(Errc::invalid_query, [&] { d_separated(g, {}, {"Y"}, {}); }));
}

TEST_CASE("selection augmentation") {
  const SelectionDag case_i = fixtures::all_accidents_selection();
  CHECK(case_i.selection() == "S");
  CHECK(case_i.graph().parents("S") == std::vector<NodeId>{"A"});
  CHECK(case_i.graph().children("S").empty());
  CHECK(case_i.causal_graph() == fixtures::all_accidents_graph());

  const SelectionDag case_ii = fixtures::severe_accidents_selection();
  CHECK(case_ii.graph().has_edge("V", "A"));
  CHECK_FALSE(case_i.graph().has_edge("V", "A"));

  const Dag g = build_dag({"X", "Y"}, {{"X", "Y"}});
  CHECK(fails_with(Errc::invalid_query, [&] { with_selection(g, {}); }));
  CHECK(fails_with(Errc::unknown_node, [&] { with_selection(g, {"Q"}); }));
  const Dag clash = build_dag({"S", "Y"}, {{"S", "Y"}});
  CHECK(fails_with(Errc::name_clash, [&] { with_selection(clash, {"Y"}); }));
  // a selection node with outgoing edges is rejected
  CHECK(fails_with(Errc::invalid_query, [&] { SelectionDag::make(g, "X"); }));
}

TEST_CASE("node splitting on the severe-accident graph") {
  const Swig sw = swig(fixtures::severe_accidents_graph(), "X");
  CHECK(sw.random_half == "X");
  CHECK(sw.fixed_half == "X@fixed");
  const std::set<NodeId> nodes(sw.graph.nodes().begin(), sw.graph.nodes().end());
  CHECK(nodes == std::set<NodeId>{"X", "X@fixed", "W", "V@X", "F@X", "A@X", "R@X"});
  CHECK(sw.relabeling ==
        std::map<NodeId, NodeId>{
            {"V", "V@X"}, {"F", "F@X"}, {"A", "A@X"}, {"R", "R@X"}});

  // random half keeps exactly its original incoming edges, no outgoing
  CHECK(sw.graph.parents("X") == std::vector<NodeId>{"W"});
  CHECK(sw.graph.children("X").empty());
  // fixed half is parentless and feeds the counterfactual copies
  CHECK(sw.graph.parents("X@fixed").empty());
  CHECK(sw.graph.children("X@fixed") == std::vector<NodeId>{"F@X", "V@X"});

  // the counterfactual outcome is screened off from the natural exposure by W
  CHECK(d_separated(sw.graph, {"X"}, {"R@X"}, {"W"}));
  CHECK_FALSE(d_separated(sw.graph, {"X"}, {"R@X"}, {}));
}

TEST_CASE("node-split invariants hold on random graphs") {
  SplitMix64 rng{51423};
  for (int rep = 0; rep < 40; ++rep) {
    const Dag g = oracle::random_dag(rng, 6);
    const NodeId x = g.nodes()[rng.next() % g.node_count()];
    const Swig sw = swig(g, x);
    CHECK(sw.graph.parents(sw.fixed_half).empty());
    CHECK(sw.graph.children(sw.random_half).empty());
    CHECK(sw.graph.parents(sw.random_half) == g.parents(x));
    std::set<NodeId> expected = descendants(g, x);
    expected.erase(x);
    std::set<NodeId> relabeled;
    for (const auto& [from, to] : sw.relabeling) {
      relabeled.insert(from);
      CHECK(to == from + "@" + x);
    }
    CHECK(relabeled == expected);
    CHECK(sw.graph.node_count() == g.node_count() + 1);
  }
}

TEST_CASE("splitting a leaf relabels nothing") {
  const Dag g = build_dag({"X", "Y"}, {{"Y", "X"}});
  const Swig sw = swig(g, "X");
  CHECK(sw.relabeling.empty());
  CHECK(sw.graph.nodes() == std::vector<NodeId>{"X", "X@fixed", "Y"});
  CHECK(sw.graph.parents("X") == std::vector<NodeId>{"Y"});
  CHECK(sw.graph.children("X@fixed").empty());
}

TEST_CASE("ancestors never shrink when an edge is added") {
  SplitMix64 rng{20240801};
  for (int rep = 0; rep < 40; ++rep) {
    const Dag g = oracle::random_dag(rng, 6);
    // candidate new edge: any (i, j) pair not creating a cycle via index order
    const auto& nodes = g.nodes();
    std::vector<std::pair<NodeId, NodeId>> missing;
    for (const NodeId& u : nodes)
      for (const NodeId& v : nodes)
        if (u != v && !g.has_edge(u, v) && !ancestors(g, u).count(v))
          missing.emplace_back(u, v);
    if (missing.empty()) continue;
    const auto& [u, v] = missing[rng.next() % missing.size()];
    auto edges = g.edges();
    edges.emplace_back(u, v);
    const Dag bigger = build_dag(nodes, edges);
    for (const NodeId& w : nodes) {
      const auto before = ancestors(g, w);
      const auto after = ancestors(bigger, w);
      CHECK(std::includes(after.begin(), after.end(), before.begin(), before.end()));
      CHECK(after.count(w) == 1);
    }
  }
}

TEST_CASE("reachability d-separation agrees with path enumeration") {
  SplitMix64 rng{977};
  int checked = 0;
  for (int rep = 0; rep < 60; ++rep) {
    const Dag g = oracle::random_dag(rng, 7);
    const auto& nodes = g.nodes();
    const int n = static_cast<int>(nodes.size());
    for (int ai = 0; ai < n; ++ai)
      for (int bi = ai + 1; bi < n; ++bi) {
        std::vector<NodeId> rest;
        for (int k = 0; k < n; ++k)
          if (k != ai && k != bi) rest.push_back(nodes[k]);
        for (std::uint32_t mask = 0; mask < (1u << rest.size()); ++mask) {
          std::set<NodeId> z;
          for (std::size_t k = 0; k < rest.size(); ++k)
            if ((mask >> k) & 1u) z.insert(rest[k]);
          const bool fast = d_separated(g, {nodes[ai]}, {nodes[bi]}, z);
          const bool slow = oracle::d_separated_by_paths(g, {nodes[ai]}, {nodes[bi]}, z);
          CHECK(fast == slow);
          // symmetry in the endpoint sets
          CHECK(fast == d_separated(g, {nodes[bi]}, {nodes[ai]}, z));
          ++checked;
        }
      }
  }
  CHECK(checked > 2000);
}

TEST_CASE("no path between the endpoint sets means separated") {
  const Dag g = build_dag({"A", "B", "C", "D"}, {{"A", "B"}, {"C", "D"}});
  CHECK(d_separated(g, {"A"}, {"C"}, {}));
  CHECK(d_separated(g, {"A", "B"}, {"C", "D"}, {}));
}
