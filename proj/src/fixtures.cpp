#include "selbias/fixtures.hpp"

namespace selbias {
namespace fixtures {

SelectionDag dag_a() {
  const Dag g = build_dag({"X", "Y", "W"}, {{"W", "X"}, {"W", "Y"}, {"X", "Y"}});
  return with_selection(g, {"Y"});
}

SelectionDag dag_b() {
  const Dag g = build_dag({"X", "Y", "W"}, {{"W", "X"}, {"W", "Y"}, {"X", "Y"}});
  SelectionDag base = with_selection(g, {"Y"});
  auto edges = base.graph().edges();
  edges.emplace_back("X", "S");
  return SelectionDag::make(Dag::make(base.graph().nodes(), edges, Dag::NameRule::bare), "S");
}

SelectionDag dag_c() {
  const Dag g = build_dag({"X", "M", "Y", "W"},
                          {{"W", "X"}, {"W", "Y"}, {"X", "M"}, {"M", "Y"}});
  return with_selection(g, {"M"});
}

Query dag_abc_query() { return Query{"X", "Y", {"W"}, "S"}; }

Dag accident_graph() {
  return build_dag({"X", "W", "V", "F", "A", "A_sev", "R", "R_sev"},
                   {{"W", "X"},
                    {"W", "V"},
                    {"W", "F"},
                    {"W", "A"},
                    {"W", "A_sev"},
                    {"X", "F"},
                    {"X", "V"},
                    {"V", "F"},
                    {"V", "A_sev"},
                    {"F", "A"},
                    {"F", "R"},
                    {"A", "R"},
                    {"A", "A_sev"},
                    {"A", "R_sev"},
                    {"A_sev", "R_sev"}});
}

Dag all_accidents_graph() {
  return build_dag({"X", "W", "V", "F", "A", "R"},
                   {{"W", "X"},
                    {"W", "V"},
                    {"W", "F"},
                    {"W", "A"},
                    {"X", "F"},
                    {"X", "V"},
                    {"V", "F"},
                    {"F", "A"},
                    {"F", "R"},
                    {"A", "R"}});
}

Dag severe_accidents_graph() {
  auto edges = all_accidents_graph().edges();
  edges.emplace_back("V", "A");
  return build_dag(all_accidents_graph().nodes(), edges);
}

SelectionDag all_accidents_selection() { return with_selection(all_accidents_graph(), {"A"}); }

SelectionDag severe_accidents_selection() {
  return with_selection(severe_accidents_graph(), {"A"});
}

Query responsibility_query(const NodeId& outcome) { return Query{"X", outcome, {"W"}, "S"}; }

}  // namespace fixtures
}  // namespace selbias
