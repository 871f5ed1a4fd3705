#include "selbias/recoverability.hpp"

#include <algorithm>

namespace selbias {

const char* rule_name(Rule r) {
  switch (r) {
    case Rule::c1: return "C1";
    case Rule::c2_first: return "C2_first";
    case Rule::c2_second: return "C2_second";
    case Rule::none: return "none";
  }
  return "none";
}

void validate_query(const SelectionDag& gs, const Query& q) {
  const Dag& g = gs.graph();
  g.index_of(q.exposure);
  g.index_of(q.outcome);
  for (const NodeId& w : q.adjustment) g.index_of(w);
  if (q.selection != gs.selection())
    fail(Errc::invalid_query,
         "query selection '" + q.selection + "' is not the graph's selection node");
  if (q.exposure == q.outcome)
    fail(Errc::invalid_query, "exposure and outcome must differ");
  if (q.adjustment.count(q.exposure) || q.adjustment.count(q.outcome))
    fail(Errc::invalid_query, "adjustment set must exclude exposure and outcome");
  if (q.selection == q.exposure || q.selection == q.outcome || q.adjustment.count(q.selection))
    fail(Errc::invalid_query, "selection node cannot appear in the query variables");
}

namespace {

std::set<NodeId> ancestral_intersection(const SelectionDag& gs, const Query& q) {
  const Dag reduced = subgraph_removing(gs.causal_graph(), {q.exposure});
  const std::set<NodeId> an_y = ancestors(reduced, q.outcome);
  const std::set<NodeId> an_s = ancestors(gs.graph(), q.selection);
  std::set<NodeId> inter;
  std::set_intersection(an_y.begin(), an_y.end(), an_s.begin(), an_s.end(),
                        std::inserter(inter, inter.begin()));
  return inter;
}

std::string independence_text(const NodeId& a, const NodeId& s, const NodeId& first,
                              const std::set<NodeId>& adjust) {
  std::set<NodeId> given = adjust;
  given.insert(first);
  std::string out = a + " _||_ " + s + " | (";
  bool comma = false;
  for (const NodeId& v : given) {
    if (comma) out += ", ";
    out += v;
    comma = true;
  }
  return out + ")";
}

}  // namespace

Verdict check_pyx_recoverable(const SelectionDag& gs, const Query& q) {
  validate_query(gs, q);
  Verdict v;
  v.witness = ancestral_intersection(gs, q);
  v.recoverable = v.witness.empty();
  v.rule = v.recoverable ? Rule::c1 : Rule::none;
  return v;
}

Verdict check_or_recoverable(const SelectionDag& gs, const Query& q) {
  validate_query(gs, q);
  std::set<NodeId> z1 = q.adjustment;
  z1.insert(q.outcome);
  Verdict v;
  if (d_separated(gs.graph(), {q.exposure}, {q.selection}, z1)) {
    v.recoverable = true;
    v.rule = Rule::c2_first;
    return v;
  }
  std::set<NodeId> z2 = q.adjustment;
  z2.insert(q.exposure);
  if (d_separated(gs.graph(), {q.outcome}, {q.selection}, z2)) {
    v.recoverable = true;
    v.rule = Rule::c2_second;
    return v;
  }
  return v;
}

Report recoverability_report(const SelectionDag& gs, const Query& q) {
  Report r;
  r.query = q;
  r.pyx = check_pyx_recoverable(gs, q);
  r.odds_ratio = check_or_recoverable(gs, q);

  ConditionResult c1;
  c1.description = "[C1] An(" + q.outcome + ") in G minus {" + q.exposure + "} intersect An(" +
                   q.selection + ") in G_s is empty";
  c1.witness = r.pyx.witness;
  c1.holds = r.pyx.recoverable;
  r.conditions.push_back(c1);

  std::set<NodeId> z1 = q.adjustment;
  z1.insert(q.outcome);
  ConditionResult c2a;
  c2a.description = "[C2 first] " + independence_text(q.exposure, q.selection, q.outcome, q.adjustment);
  c2a.holds = d_separated(gs.graph(), {q.exposure}, {q.selection}, z1);
  r.conditions.push_back(c2a);

  std::set<NodeId> z2 = q.adjustment;
  z2.insert(q.exposure);
  ConditionResult c2b;
  c2b.description = "[C2 second] " + independence_text(q.outcome, q.selection, q.exposure, q.adjustment);
  c2b.holds = d_separated(gs.graph(), {q.outcome}, {q.selection}, z2);
  r.conditions.push_back(c2b);
  return r;
}

std::string render_report(const Report& r) {
  std::string out;
  out += "P(" + r.query.outcome + "_x): ";
  if (r.pyx.recoverable)
    out += "RECOVERABLE via C1\n";
  else
    out += "NOT RECOVERABLE, witness " + format_node_set(r.pyx.witness) + "\n";

  out += "OR: ";
  if (r.odds_ratio.recoverable) {
    const ConditionResult& line = r.odds_ratio.rule == Rule::c2_first ? r.conditions[1] : r.conditions[2];
    std::string cond = line.description;
    cond.erase(0, cond.find("] ") + 2);
    out += "RECOVERABLE via " + cond + "\n";
  } else {
    out += "NOT RECOVERABLE\n";
  }
  for (const ConditionResult& c : r.conditions) {
    out += "  " + c.description + ": ";
    out += c.holds ? "HOLDS" : "FAILS";
    if (!c.witness.empty()) out += " " + format_node_set(c.witness);
    out += "\n";
  }
  out += "  (conditions are graphical guarantees; a particular model can satisfy an\n"
         "   independence numerically even when the graph does not guarantee it)\n";
  return out;
}

}  // namespace selbias
