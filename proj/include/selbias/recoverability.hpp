#pragma once

#include <set>
#include <string>
#include <vector>

#include "selbias/graph.hpp"

namespace selbias {

/// A recoverability question: exposure X, outcome Y, adjustment set W and
/// the selection node S of the graph under study.
struct Query {
  NodeId exposure;
  NodeId outcome;
  std::set<NodeId> adjustment;
  NodeId selection;
};

enum class Rule { c1, c2_first, c2_second, none };

const char* rule_name(Rule r);

/// Outcome of one recoverability check. For a failed ancestral-intersection
/// check the witness is the non-empty intersection; verdicts reached through
/// an independence rule carry an empty witness.
struct Verdict {
  bool recoverable = false;
  Rule rule = Rule::none;
  std::set<NodeId> witness;
};

/// P(Y_x) is recoverable from the S=1 slice iff the inclusive ancestors of
/// the outcome in the exposure-deleted causal graph do not meet the
/// inclusive ancestors of the selection node in the augmented graph.
Verdict check_pyx_recoverable(const SelectionDag& gs, const Query& q);

/// The adjusted odds-ratio is recoverable iff X is d-separated from S given
/// (Y, W), or Y is d-separated from S given (X, W).
Verdict check_or_recoverable(const SelectionDag& gs, const Query& q);

struct ConditionResult {
  std::string description;
  bool holds = false;
  std::set<NodeId> witness;  // populated for the ancestral-intersection line
};

/// Both verdicts plus every tested condition. The independence lines state
/// what is graphically guaranteed; a particular distribution may satisfy an
/// independence numerically even when the graph does not guarantee it.
struct Report {
  Query query;
  Verdict pyx;
  Verdict odds_ratio;
  std::vector<ConditionResult> conditions;
};

Report recoverability_report(const SelectionDag& gs, const Query& q);

/// Plain-text rendering: one line per tested condition, HOLDS/FAILS,
/// witness set in braces.
std::string render_report(const Report& r);

void validate_query(const SelectionDag& gs, const Query& q);

}  // namespace selbias
