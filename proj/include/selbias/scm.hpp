#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "selbias/graph.hpp"

namespace selbias {

// Mechanisms for binary variables. Every variable v is generated as
// v = 1[eps_v <= p_v(parents)] with eps_v an independent uniform on [0,1];
// the deterministic gates use the degenerate thresholds 0 and 1.
struct Bernoulli {
  double p = 0.5;
};
struct Logistic {
  double intercept = 0.0;
  std::vector<double> coefficients;  // one per parent, declared order
};
struct Table {
  std::vector<double> p_one;  // 2^k entries, parent bits big-endian in declared order
};
struct AndGate {};
struct OrGate {};
using Mechanism = std::variant<Bernoulli, Logistic, Table, AndGate, OrGate>;

/// Numerically stable sigmoid.
double sigmoid(double x);

/// Largest variable count accepted by the exact enumeration routines
/// (2^20 joint states).
inline constexpr std::size_t kMaxExactVariables = 20;

/// Cap for the three-world counterfactual enumeration, which walks up to
/// four disturbance segments per variable.
inline constexpr std::size_t kMaxCounterfactualVariables = 12;

enum class Execution { serial, parallel };

/// Exact distribution over an ordered variable subset. Index convention:
/// variables()[0] is the most significant bit of the assignment index, so
/// mass()[idx] is the probability of the assignment spelled by the bits of
/// idx. Every assignment is present; the mass sums to one within 1e-12.
class ProbTable {
 public:
  ProbTable() : mass_{1.0} {}  // the empty joint: one assignment, mass one
  ProbTable(std::vector<NodeId> variables, std::vector<double> mass);

  const std::vector<NodeId>& variables() const { return vars_; }
  const std::vector<double>& mass() const { return mass_; }
  std::size_t position(const NodeId& v) const;

  double probability_of(const std::map<NodeId, int>& assignment) const;

 private:
  std::vector<NodeId> vars_;
  std::vector<double> mass_;
};

/// Binary structural causal model: a DAG, one mechanism per variable and an
/// explicit parent order for each mechanism. Immutable after construction;
/// all query operations are pure.
class DiscreteScm {
 public:
  struct VariableDef {
    std::vector<NodeId> parents;  // permutation of the graph parents
    Mechanism mechanism;
  };

  static DiscreteScm make(const Dag& graph, const std::map<NodeId, VariableDef>& defs);

  const Dag& graph() const { return graph_; }
  /// Variables in the canonical topological order used by joint().
  const std::vector<NodeId>& variables() const { return order_; }
  const std::vector<NodeId>& parent_order(const NodeId& v) const;
  const Mechanism& mechanism(const NodeId& v) const;

  std::size_t variable_count() const { return order_.size(); }
  int position(const NodeId& v) const;

  /// P(v = 1 | parent bits), parent bits big-endian in declared order.
  double threshold(int var_pos, std::uint32_t parent_bits) const {
    return thresholds_[var_pos][parent_bits];
  }
  const std::vector<int>& parent_positions(int var_pos) const { return parent_pos_[var_pos]; }

 private:
  Dag graph_;
  std::vector<NodeId> order_;
  std::map<NodeId, int> pos_;
  std::vector<std::vector<NodeId>> parent_names_;
  std::vector<Mechanism> mech_;
  std::vector<std::vector<int>> parent_pos_;        // positions in `order_`
  std::vector<std::vector<double>> thresholds_;     // per variable, 2^k entries
};

/// Exact joint over all variables by full enumeration. Serial and parallel
/// produce bit-identical tables; entries are independent products, so the
/// parallel kernel needs no reduction.
ProbTable joint(const DiscreteScm& m, Execution exec = Execution::parallel);

/// Graph surgery: assigned nodes lose their incoming edges and their
/// mechanism becomes the constant.
DiscreteScm intervene(const DiscreteScm& m, const std::map<NodeId, int>& assignments);

/// Exact conditional probability P(targets | given).
double prob(const ProbTable& t, const std::map<NodeId, int>& targets,
            const std::map<NodeId, int>& given = {});

ProbTable marginal(const ProbTable& t, const std::vector<NodeId>& vars);

/// Largest deviation max |P(a,b|z) - P(a|z) P(b|z)| over all configurations,
/// skipping zero-mass strata of z.
double independence_violation(const ProbTable& t, const std::set<NodeId>& a,
                              const std::set<NodeId>& b, const std::set<NodeId>& z);

bool cond_independent(const DiscreteScm& m, const std::set<NodeId>& a,
                      const std::set<NodeId>& b, const std::set<NodeId>& z, double tol);

enum class EffectScale { risk_difference, risk_ratio, odds_ratio };

struct AdjustedEffect {
  EffectScale scale;
  /// Marginalized effect for risk scales; the stratum value for the
  /// odds-ratio when there is exactly one stratum.
  double value = 0.0;
  /// Per-stratum odds-ratios keyed by the adjustment bits (big-endian in
  /// the sorted order of the adjustment set); filled for the odds-ratio
  /// scale only.
  std::map<std::vector<int>, double> per_stratum;
};

/// Back-door adjustment over the strata of w. Requires positivity of the
/// exposure in every positive-mass stratum.
AdjustedEffect adjusted_effect(const DiscreteScm& m, const NodeId& x, const NodeId& y,
                               const std::set<NodeId>& w, EffectScale scale);

/// Joint law of kept actual variables together with their counterfactual
/// copies under do(x=0) and do(x=1), coupled through the shared uniform
/// disturbances. Copies are named `v@0` and `v@1`.
struct CfJoint {
  NodeId exposure;
  std::vector<NodeId> actual;   // kept variables, topological order
  std::vector<NodeId> cf_zero;  // copies under do(x=0)
  std::vector<NodeId> cf_one;   // copies under do(x=1)
  ProbTable combined;           // variables = actual + cf_zero + cf_one
};

CfJoint counterfactual_joint(const DiscreteScm& m, const NodeId& x, const std::set<NodeId>& keep);

/// Ancestrally sampled rows, one byte per variable, variables in
/// topological order. Same seed means a byte-identical dataset, independent
/// of the execution mode and thread count.
struct Dataset {
  std::vector<NodeId> variables;
  std::size_t rows = 0;
  std::vector<std::uint8_t> data;  // row-major

  int at(std::size_t row, std::size_t col) const { return data[row * variables.size() + col]; }
  std::size_t column(const NodeId& v) const;
};

Dataset sample(const DiscreteScm& m, std::size_t n, std::uint64_t seed,
               Execution exec = Execution::parallel);

/// Empirical conditional probability from a dataset; returns the pair
/// (estimate, conditioning count).
std::pair<double, std::size_t> empirical_prob(const Dataset& ds,
                                              const std::map<NodeId, int>& targets,
                                              const std::map<NodeId, int>& given = {});

}  // namespace selbias
