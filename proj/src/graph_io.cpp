#include "selbias/graph_io.hpp"

#include <fstream>
#include <sstream>
#include <vector>

namespace selbias {

namespace {

std::vector<std::string> split_tokens(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream is(line);
  std::string tok;
  while (is >> tok) {
    if (tok[0] == '#') break;
    out.push_back(tok);
  }
  return out;
}

[[noreturn]] void parse_fail(const std::string& file, int line, const std::string& what) {
  fail(Errc::parse, file + ":" + std::to_string(line) + ": " + what);
}

}  // namespace

SelectionDag ParsedDag::selection_dag() const {
  if (!selection) fail(Errc::invalid_query, "graph has no selection node");
  return SelectionDag::make(dag, *selection);
}

ParsedDag parse_dag_text(std::istream& in, const std::string& filename) {
  std::vector<NodeId> nodes;
  std::vector<std::pair<NodeId, NodeId>> edges;
  std::optional<NodeId> selection;
  std::set<NodeId> declared;

  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto toks = split_tokens(line);
    if (toks.empty()) continue;
    const std::string& kw = toks[0];
    if (kw == "node" || kw == "snode") {
      if (toks.size() != 2) parse_fail(filename, lineno, "'" + kw + "' expects one name");
      const NodeId& name = toks[1];
      if (!is_bare_node_name(name))
        parse_fail(filename, lineno, "invalid node name '" + name + "'");
      if (declared.count(name))
        parse_fail(filename, lineno, "node '" + name + "' declared twice");
      if (kw == "snode") {
        if (selection)
          parse_fail(filename, lineno, "second selection node '" + name + "'");
        selection = name;
      }
      declared.insert(name);
      nodes.push_back(name);
    } else if (kw == "edge") {
      if (toks.size() != 3) parse_fail(filename, lineno, "'edge' expects parent and child");
      for (int i : {1, 2})
        if (!declared.count(toks[i]))
          parse_fail(filename, lineno, "undeclared node '" + toks[i] + "' in edge");
      edges.emplace_back(toks[1], toks[2]);
    } else {
      parse_fail(filename, lineno, "unknown statement '" + kw + "'");
    }
  }

  ParsedDag out;
  try {
    out.dag = build_dag(nodes, edges);
  } catch (const Error& e) {
    fail(Errc::parse, filename + ": " + e.what());
  }
  out.selection = selection;
  if (selection) SelectionDag::make(out.dag, *selection);  // validate sink + parents
  return out;
}

ParsedDag parse_dag_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::parse, path + ": cannot open file");
  return parse_dag_text(in, path);
}

std::string render_dag(const Dag& g, const std::optional<NodeId>& selection) {
  std::string out;
  for (const NodeId& v : g.nodes()) {
    out += (selection && *selection == v) ? "snode " : "node ";
    out += v;
    out += '\n';
  }
  for (const auto& [p, c] : g.edges()) out += "edge " + p + " " + c + "\n";
  return out;
}

}  // namespace selbias
