#include "selbias/scm_io.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <vector>

namespace selbias {

namespace {

[[noreturn]] void parse_fail(const std::string& file, int line, const std::string& what) {
  fail(Errc::parse, file + ":" + std::to_string(line) + ": " + what);
}

double parse_number(const std::string& file, int line, const std::string& tok) {
  const char* begin = tok.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end != begin + tok.size())
    parse_fail(file, line, "expected a number, got '" + tok + "'");
  return v;
}

}  // namespace

DiscreteScm parse_scm_text(std::istream& in, const std::string& filename) {
  std::vector<NodeId> nodes;
  std::vector<std::pair<NodeId, NodeId>> edges;
  std::map<NodeId, DiscreteScm::VariableDef> defs;

  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::vector<std::string> toks;
    {
      std::istringstream is(line);
      std::string t;
      while (is >> t) {
        if (t[0] == '#') break;
        toks.push_back(t);
      }
    }
    if (toks.empty()) continue;
    if (toks[0] != "var") parse_fail(filename, lineno, "unknown statement '" + toks[0] + "'");
    if (toks.size() < 4 || toks[2] != "parents")
      parse_fail(filename, lineno, "expected 'var <name> parents ... : <mechanism>'");
    const NodeId name = toks[1];
    if (!is_bare_node_name(name)) parse_fail(filename, lineno, "invalid variable name '" + name + "'");
    if (defs.count(name)) parse_fail(filename, lineno, "variable '" + name + "' declared twice");

    std::size_t i = 3;
    std::vector<NodeId> parents;
    while (i < toks.size() && toks[i] != ":") {
      if (!is_bare_node_name(toks[i]))
        parse_fail(filename, lineno, "invalid parent name '" + toks[i] + "'");
      parents.push_back(toks[i]);
      ++i;
    }
    if (i >= toks.size() || toks[i] != ":")
      parse_fail(filename, lineno, "missing ':' before the mechanism");
    ++i;
    if (i >= toks.size()) parse_fail(filename, lineno, "missing mechanism");
    const std::string kind = toks[i++];
    std::vector<double> args;
    for (; i < toks.size(); ++i) args.push_back(parse_number(filename, lineno, toks[i]));

    Mechanism mech;
    if (kind == "bernoulli") {
      if (args.size() != 1) parse_fail(filename, lineno, "bernoulli expects one probability");
      mech = Bernoulli{args[0]};
    } else if (kind == "logistic") {
      if (args.size() != parents.size() + 1)
        parse_fail(filename, lineno, "logistic expects an intercept and one coefficient per parent");
      mech = Logistic{args[0], std::vector<double>(args.begin() + 1, args.end())};
    } else if (kind == "table") {
      if (args.size() != (std::size_t{1} << parents.size()))
        parse_fail(filename, lineno, "table expects 2^parents values");
      mech = Table{args};
    } else if (kind == "and") {
      if (!args.empty()) parse_fail(filename, lineno, "'and' takes no arguments");
      mech = AndGate{};
    } else if (kind == "or") {
      if (!args.empty()) parse_fail(filename, lineno, "'or' takes no arguments");
      mech = OrGate{};
    } else {
      parse_fail(filename, lineno, "unknown mechanism '" + kind + "'");
    }

    nodes.push_back(name);
    for (const NodeId& p : parents) edges.emplace_back(p, name);
    defs[name] = {parents, mech};
  }

  try {
    return DiscreteScm::make(build_dag(nodes, edges), defs);
  } catch (const Error& e) {
    if (e.error_class() == ErrorClass::parse) throw;
    fail(Errc::parse, filename + ": " + e.what());
  }
}

DiscreteScm parse_scm_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::parse, path + ": cannot open file");
  return parse_scm_text(in, path);
}

}  // namespace selbias
