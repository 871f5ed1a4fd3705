#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "selbias/graph.hpp"

namespace selbias {

/// Result of parsing the DAG text format. `selection` is set when the file
/// declares an `snode`.
struct ParsedDag {
  Dag dag;
  std::optional<NodeId> selection;

  SelectionDag selection_dag() const;  // requires `selection`
};

/// DAG text format, one statement per line:
///   node <name>
///   snode <name>        selection node, at most one per file
///   edge <parent> <child>
/// `#` starts a comment; blank lines are ignored. Nodes must be declared
/// before they are used in an edge.
ParsedDag parse_dag_text(std::istream& in, const std::string& filename);
ParsedDag parse_dag_file(const std::string& path);

std::string render_dag(const Dag& g, const std::optional<NodeId>& selection = std::nullopt);

}  // namespace selbias
