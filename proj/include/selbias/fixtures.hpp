#pragma once

#include "selbias/graph.hpp"
#include "selbias/recoverability.hpp"

namespace selbias {
namespace fixtures {

// The three selection-bias examples: selection on the outcome (A),
// selection on the outcome with a direct exposure edge (B), selection on a
// descendant of a mediator (C).
SelectionDag dag_a();
SelectionDag dag_b();
SelectionDag dag_c();

Query dag_abc_query();  // exposure X, outcome Y, adjustment {W}

/// Full accident/severity graph with both the plain and severe accident
/// chains (nodes A_sev, R_sev alongside A, R).
Dag accident_graph();

/// Causal graphs behind the two study designs: data from all accidents
/// (no speed -> accident edge) and data from severe accidents only.
Dag all_accidents_graph();
Dag severe_accidents_graph();

/// The same graphs with the selection node attached to the accident node.
SelectionDag all_accidents_selection();
SelectionDag severe_accidents_selection();

Query responsibility_query(const NodeId& outcome);  // exposure X, adjustment {W}

}  // namespace fixtures
}  // namespace selbias
