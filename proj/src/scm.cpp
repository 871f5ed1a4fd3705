#include "selbias/scm.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "selbias/rng.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace selbias {

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

namespace {

// Compensated sum; keeps the normalization check meaningful at 2^20 terms.
double neumaier_sum(const std::vector<double>& xs) {
  double sum = 0.0, comp = 0.0;
  for (double x : xs) {
    const double t = sum + x;
    comp += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
    sum = t;
  }
  return sum + comp;
}

double odds_log(double p) {
  if (p <= 0.0 || p >= 1.0)
    fail(Errc::numerical_overflow, "odds of a degenerate probability");
  return std::log(p) - std::log1p(-p);
}

}  // namespace

ProbTable::ProbTable(std::vector<NodeId> variables, std::vector<double> mass)
    : vars_(std::move(variables)), mass_(std::move(mass)) {
  if (vars_.size() >= 8 * sizeof(std::size_t) ||
      mass_.size() != (std::size_t{1} << vars_.size()))
    fail(Errc::invalid_params, "probability table size does not match variable count");
  for (double m : mass_)
    if (!(m >= 0.0)) fail(Errc::invalid_params, "negative or NaN probability mass");
  const double total = neumaier_sum(mass_);
  if (std::abs(total - 1.0) > 1e-12)
    fail(Errc::invalid_params, "probability mass does not sum to one");
}

std::size_t ProbTable::position(const NodeId& v) const {
  const auto it = std::find(vars_.begin(), vars_.end(), v);
  if (it == vars_.end()) fail(Errc::unknown_node, "variable '" + v + "' not in table");
  return static_cast<std::size_t>(it - vars_.begin());
}

double ProbTable::probability_of(const std::map<NodeId, int>& assignment) const {
  const std::size_t k = vars_.size();
  std::uint64_t care = 0, want = 0;
  for (const auto& [v, bit] : assignment) {
    const std::size_t pos = position(v);
    const std::uint64_t mask = std::uint64_t{1} << (k - 1 - pos);
    care |= mask;
    if (bit) want |= mask;
  }
  double out = 0.0;
  for (std::size_t idx = 0; idx < mass_.size(); ++idx)
    if ((idx & care) == want) out += mass_[idx];
  return out;
}

DiscreteScm DiscreteScm::make(const Dag& graph, const std::map<NodeId, VariableDef>& defs) {
  DiscreteScm m;
  m.graph_ = graph;
  m.order_ = graph.topo_order();
  for (std::size_t i = 0; i < m.order_.size(); ++i) m.pos_[m.order_[i]] = static_cast<int>(i);
  for (const auto& entry : defs) graph.index_of(entry.first);
  const std::size_t n = m.order_.size();
  m.parent_names_.resize(n);
  m.mech_.resize(n);
  m.parent_pos_.resize(n);
  m.thresholds_.resize(n);

  for (std::size_t i = 0; i < n; ++i) {
    const NodeId& v = m.order_[i];
    const auto it = defs.find(v);
    if (it == defs.end()) fail(Errc::invalid_params, "no mechanism for variable '" + v + "'");
    const VariableDef& def = it->second;

    std::vector<NodeId> graph_parents = graph.parents(v);
    std::vector<NodeId> declared = def.parents;
    std::sort(declared.begin(), declared.end());
    if (declared != graph_parents)
      fail(Errc::invalid_params,
           "parent order for '" + v + "' is not a permutation of its graph parents");
    const std::size_t k = def.parents.size();
    if (k > 24) fail(Errc::too_large, "variable '" + v + "' has too many parents");

    const Mechanism& mech = def.mechanism;
    if (std::holds_alternative<Bernoulli>(mech)) {
      const double p = std::get<Bernoulli>(mech).p;
      if (k != 0) fail(Errc::arity_mismatch, "bernoulli mechanism on '" + v + "' takes no parents");
      if (!(p >= 0.0 && p <= 1.0))
        fail(Errc::invalid_params, "bernoulli probability out of [0,1] on '" + v + "'");
    } else if (std::holds_alternative<Logistic>(mech)) {
      const Logistic& lg = std::get<Logistic>(mech);
      if (lg.coefficients.size() != k)
        fail(Errc::arity_mismatch, "logistic mechanism on '" + v + "' needs one coefficient per parent");
      if (!std::isfinite(lg.intercept) ||
          std::any_of(lg.coefficients.begin(), lg.coefficients.end(),
                      [](double c) { return !std::isfinite(c); }))
        fail(Errc::invalid_params, "non-finite logistic parameter on '" + v + "'");
    } else if (std::holds_alternative<Table>(mech)) {
      const Table& tb = std::get<Table>(mech);
      if (tb.p_one.size() != (std::size_t{1} << k))
        fail(Errc::arity_mismatch, "table on '" + v + "' needs exactly 2^parents rows");
      for (double p : tb.p_one)
        if (!(p >= 0.0 && p <= 1.0))
          fail(Errc::invalid_params, "table probability out of [0,1] on '" + v + "'");
    } else {
      if (k == 0) fail(Errc::arity_mismatch, "gate mechanism on '" + v + "' needs at least one parent");
    }

    m.parent_names_[i] = def.parents;
    m.mech_[i] = mech;
    for (const NodeId& p : def.parents) m.parent_pos_[i].push_back(m.pos_.at(p));

    std::vector<double>& th = m.thresholds_[i];
    th.resize(std::size_t{1} << k);
    for (std::uint32_t cfg = 0; cfg < th.size(); ++cfg) {
      if (std::holds_alternative<Bernoulli>(mech)) {
        th[cfg] = std::get<Bernoulli>(mech).p;
      } else if (std::holds_alternative<Logistic>(mech)) {
        const Logistic& lg = std::get<Logistic>(mech);
        double lin = lg.intercept;
        for (std::size_t j = 0; j < k; ++j)
          if ((cfg >> (k - 1 - j)) & 1u) lin += lg.coefficients[j];
        th[cfg] = sigmoid(lin);
      } else if (std::holds_alternative<Table>(mech)) {
        th[cfg] = std::get<Table>(mech).p_one[cfg];
      } else if (std::holds_alternative<AndGate>(mech)) {
        th[cfg] = cfg == (std::size_t{1} << k) - 1 ? 1.0 : 0.0;
      } else {
        th[cfg] = cfg != 0 ? 1.0 : 0.0;
      }
    }
  }
  return m;
}

const std::vector<NodeId>& DiscreteScm::parent_order(const NodeId& v) const {
  return parent_names_[position(v)];
}

const Mechanism& DiscreteScm::mechanism(const NodeId& v) const { return mech_[position(v)]; }

int DiscreteScm::position(const NodeId& v) const {
  const auto it = pos_.find(v);
  if (it == pos_.end()) fail(Errc::unknown_node, "unknown variable '" + v + "'");
  return it->second;
}

namespace {

// Mass of one full assignment, bits big-endian in topological order.
inline double state_mass(const DiscreteScm& m, std::size_t n, std::size_t idx) {
  double p = 1.0;
  for (std::size_t v = 0; v < n; ++v) {
    const auto& ppos = m.parent_positions(static_cast<int>(v));
    std::uint32_t cfg = 0;
    for (int pp : ppos) cfg = (cfg << 1) | ((idx >> (n - 1 - pp)) & 1u);
    const double t = m.threshold(static_cast<int>(v), cfg);
    p *= ((idx >> (n - 1 - v)) & 1u) ? t : 1.0 - t;
  }
  return p;
}

}  // namespace

ProbTable joint(const DiscreteScm& m, Execution exec) {
  const std::size_t n = m.variable_count();
  if (n > kMaxExactVariables)
    fail(Errc::too_large, "exact enumeration capped at " + std::to_string(kMaxExactVariables) +
                              " variables, model has " + std::to_string(n));
  const std::size_t states = std::size_t{1} << n;
  std::vector<double> mass(states);
  if (exec == Execution::parallel) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (std::int64_t idx = 0; idx < static_cast<std::int64_t>(states); ++idx)
      mass[idx] = state_mass(m, n, static_cast<std::size_t>(idx));
  } else {
    for (std::size_t idx = 0; idx < states; ++idx) mass[idx] = state_mass(m, n, idx);
  }
  return ProbTable(m.variables(), std::move(mass));
}

DiscreteScm intervene(const DiscreteScm& m, const std::map<NodeId, int>& assignments) {
  for (const auto& [v, bit] : assignments) {
    m.position(v);
    if (bit != 0 && bit != 1) fail(Errc::invalid_params, "intervention value must be 0 or 1");
  }
  std::vector<std::pair<NodeId, NodeId>> edges;
  for (const auto& e : m.graph().edges())
    if (!assignments.count(e.second)) edges.push_back(e);
  const Dag cut = Dag::make(m.graph().nodes(), edges, Dag::NameRule::any);

  std::map<NodeId, DiscreteScm::VariableDef> defs;
  for (const NodeId& v : m.variables()) {
    const auto it = assignments.find(v);
    if (it == assignments.end())
      defs[v] = {m.parent_order(v), m.mechanism(v)};
    else
      defs[v] = {{}, Bernoulli{static_cast<double>(it->second)}};
  }
  return DiscreteScm::make(cut, defs);
}

double prob(const ProbTable& t, const std::map<NodeId, int>& targets,
            const std::map<NodeId, int>& given) {
  const double pg = given.empty() ? 1.0 : t.probability_of(given);
  if (pg == 0.0) fail(Errc::zero_conditioning_event, "conditioning event has zero mass");
  std::map<NodeId, int> both = given;
  for (const auto& [v, bit] : targets) {
    const auto it = both.find(v);
    if (it != both.end() && it->second != bit) return 0.0;
    both[v] = bit;
  }
  return t.probability_of(both) / pg;
}

ProbTable marginal(const ProbTable& t, const std::vector<NodeId>& vars) {
  const std::size_t k = t.variables().size();
  std::vector<std::size_t> shift;
  for (const NodeId& v : vars) shift.push_back(k - 1 - t.position(v));
  std::vector<double> mass(std::size_t{1} << vars.size(), 0.0);
  const auto& src = t.mass();
  for (std::size_t idx = 0; idx < src.size(); ++idx) {
    std::size_t out = 0;
    for (std::size_t j = 0; j < shift.size(); ++j)
      out = (out << 1) | ((idx >> shift[j]) & 1u);
    mass[out] += src[idx];
  }
  return ProbTable(vars, std::move(mass));
}

double independence_violation(const ProbTable& t, const std::set<NodeId>& a,
                              const std::set<NodeId>& b, const std::set<NodeId>& z) {
  std::vector<NodeId> vars(a.begin(), a.end());
  vars.insert(vars.end(), b.begin(), b.end());
  vars.insert(vars.end(), z.begin(), z.end());
  std::set<NodeId> dedup(vars.begin(), vars.end());
  if (dedup.size() != vars.size()) fail(Errc::overlapping_sets, "a, b, z must be disjoint");

  const ProbTable mt = marginal(t, vars);
  const std::size_t ka = a.size(), kb = b.size(), kz = z.size();
  const std::size_t na = std::size_t{1} << ka, nb = std::size_t{1} << kb,
                    nz = std::size_t{1} << kz;
  std::vector<double> pz(nz, 0.0), paz(na * nz, 0.0), pbz(nb * nz, 0.0);
  const auto& mass = mt.mass();
  for (std::size_t idx = 0; idx < mass.size(); ++idx) {
    const std::size_t zi = idx & (nz - 1);
    const std::size_t bi = (idx >> kz) & (nb - 1);
    const std::size_t ai = idx >> (kz + kb);
    pz[zi] += mass[idx];
    paz[ai * nz + zi] += mass[idx];
    pbz[bi * nz + zi] += mass[idx];
  }
  double worst = 0.0;
  for (std::size_t zi = 0; zi < nz; ++zi) {
    if (pz[zi] <= 0.0) continue;  // undefined conditionals are skipped
    for (std::size_t ai = 0; ai < na; ++ai)
      for (std::size_t bi = 0; bi < nb; ++bi) {
        const double pab = mass[(ai << (kb + kz)) | (bi << kz) | zi] / pz[zi];
        const double pa = paz[ai * nz + zi] / pz[zi];
        const double pb = pbz[bi * nz + zi] / pz[zi];
        worst = std::max(worst, std::abs(pab - pa * pb));
      }
  }
  return worst;
}

bool cond_independent(const DiscreteScm& m, const std::set<NodeId>& a,
                      const std::set<NodeId>& b, const std::set<NodeId>& z, double tol) {
  return independence_violation(joint(m), a, b, z) <= tol;
}

AdjustedEffect adjusted_effect(const DiscreteScm& m, const NodeId& x, const NodeId& y,
                               const std::set<NodeId>& w, EffectScale scale) {
  if (x == y || w.count(x) || w.count(y))
    fail(Errc::invalid_query, "adjustment set must be disjoint from exposure and outcome");
  std::vector<NodeId> vars{x, y};
  vars.insert(vars.end(), w.begin(), w.end());
  const ProbTable t = marginal(joint(m), vars);
  const std::size_t kw = w.size();
  const std::size_t nw = std::size_t{1} << kw;
  const auto& mass = t.mass();

  AdjustedEffect out;
  out.scale = scale;
  double risk1 = 0.0, risk0 = 0.0;
  for (std::size_t wi = 0; wi < nw; ++wi) {
    // layout: x is the top bit, y next, then the w bits
    auto cell = [&](std::size_t xb, std::size_t yb) {
      return mass[(xb << (kw + 1)) | (yb << kw) | wi];
    };
    const double pw = cell(0, 0) + cell(0, 1) + cell(1, 0) + cell(1, 1);
    if (pw == 0.0) continue;
    const double px1 = (cell(1, 0) + cell(1, 1)) / pw;
    if (!(px1 > 0.0 && px1 < 1.0))
      fail(Errc::positivity_violation,
           "exposure '" + x + "' is degenerate in a positive-mass stratum");
    const double p1 = cell(1, 1) / (cell(1, 0) + cell(1, 1));
    const double p0 = cell(0, 1) / (cell(0, 0) + cell(0, 1));
    risk1 += p1 * pw;
    risk0 += p0 * pw;
    if (scale == EffectScale::odds_ratio) {
      std::vector<int> bits(kw);
      for (std::size_t j = 0; j < kw; ++j) bits[j] = (wi >> (kw - 1 - j)) & 1u;
      out.per_stratum[bits] = std::exp(odds_log(p1) - odds_log(p0));
    }
  }
  switch (scale) {
    case EffectScale::risk_difference:
      out.value = risk1 - risk0;
      break;
    case EffectScale::risk_ratio:
      if (risk0 == 0.0) fail(Errc::numerical_overflow, "risk ratio with zero baseline risk");
      out.value = risk1 / risk0;
      break;
    case EffectScale::odds_ratio:
      // the odds-ratio does not marginalize; a single stratum has a value,
      // otherwise only the per-stratum map is meaningful
      out.value = out.per_stratum.size() == 1 ? out.per_stratum.begin()->second
                                              : std::numeric_limits<double>::quiet_NaN();
      break;
  }
  return out;
}

CfJoint counterfactual_joint(const DiscreteScm& m, const NodeId& x, const std::set<NodeId>& keep) {
  const std::size_t n = m.variable_count();
  m.position(x);
  for (const NodeId& v : keep) m.position(v);
  if (n > kMaxCounterfactualVariables)
    fail(Errc::too_large, "counterfactual enumeration capped at " +
                              std::to_string(kMaxCounterfactualVariables) + " variables");

  CfJoint out;
  out.exposure = x;
  for (const NodeId& v : m.variables())
    if (keep.count(v)) out.actual.push_back(v);
  for (const NodeId& v : out.actual)
    if (v != x) {
      out.cf_zero.push_back(v + "@0");
      out.cf_one.push_back(v + "@1");
    }

  std::vector<NodeId> combined = out.actual;
  combined.insert(combined.end(), out.cf_zero.begin(), out.cf_zero.end());
  combined.insert(combined.end(), out.cf_one.begin(), out.cf_one.end());
  if (combined.size() > kMaxExactVariables)
    fail(Errc::too_large, "counterfactual table over " + std::to_string(combined.size()) +
                              " variables exceeds the enumeration cap");

  // leaf projection: positions of the kept variables per world
  const int xpos = m.position(x);
  std::vector<int> keep_pos;
  for (const NodeId& v : out.actual) keep_pos.push_back(m.position(v));

  std::vector<double> mass(std::size_t{1} << combined.size(), 0.0);
  // per-variable values in the three worlds: actual, do(x=0), do(x=1)
  std::vector<std::array<int, 3>> state(n);

  auto parent_cfg = [&](int vpos, int world) {
    std::uint32_t cfg = 0;
    for (int pp : m.parent_positions(vpos)) cfg = (cfg << 1) | state[pp][world];
    return cfg;
  };

  auto emit = [&](double p) {
    std::size_t idx = 0;
    for (int kp : keep_pos) idx = (idx << 1) | state[kp][0];
    for (int kp : keep_pos)
      if (kp != xpos) idx = (idx << 1) | state[kp][1];
    for (int kp : keep_pos)
      if (kp != xpos) idx = (idx << 1) | state[kp][2];
    mass[idx] += p;
  };

  auto rec = [&](auto&& self, std::size_t v, double p) -> void {
    if (v == n) {
      emit(p);
      return;
    }
    const int vpos = static_cast<int>(v);
    double th[3];
    th[0] = m.threshold(vpos, parent_cfg(vpos, 0));
    if (vpos == xpos) {
      th[1] = 0.0;
      th[2] = 1.0;
    } else {
      th[1] = m.threshold(vpos, parent_cfg(vpos, 1));
      th[2] = m.threshold(vpos, parent_cfg(vpos, 2));
    }
    // The shared disturbance partitions [0,1] at the distinct thresholds;
    // each segment pins the variable's value in all three worlds at once.
    double cuts[5] = {0.0, th[0], th[1], th[2], 1.0};
    std::sort(cuts, cuts + 5);
    for (int s = 0; s < 4; ++s) {
      const double lo = cuts[s], hi = cuts[s + 1];
      if (hi <= lo) continue;
      for (int world = 0; world < 3; ++world) state[v][world] = th[world] >= hi ? 1 : 0;
      self(self, v + 1, p * (hi - lo));
    }
  };
  rec(rec, 0, 1.0);

  out.combined = ProbTable(combined, std::move(mass));
  return out;
}

std::size_t Dataset::column(const NodeId& v) const {
  const auto it = std::find(variables.begin(), variables.end(), v);
  if (it == variables.end()) fail(Errc::unknown_node, "variable '" + v + "' not in dataset");
  return static_cast<std::size_t>(it - variables.begin());
}

Dataset sample(const DiscreteScm& m, std::size_t n, std::uint64_t seed, Execution exec) {
  if (n == 0) fail(Errc::invalid_params, "sample size must be at least one");
  const std::size_t k = m.variable_count();
  Dataset ds;
  ds.variables = m.variables();
  ds.rows = n;
  ds.data.resize(n * k);

  auto draw_row = [&](std::size_t row) {
    SplitMix64 rng = stream_rng(seed, row);
    std::uint8_t* out = ds.data.data() + row * k;
    for (std::size_t v = 0; v < k; ++v) {
      std::uint32_t cfg = 0;
      for (int pp : m.parent_positions(static_cast<int>(v))) cfg = (cfg << 1) | out[pp];
      out[v] = rng.next_unit() < m.threshold(static_cast<int>(v), cfg) ? 1 : 0;
    }
  };
  if (exec == Execution::parallel) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (std::int64_t row = 0; row < static_cast<std::int64_t>(n); ++row)
      draw_row(static_cast<std::size_t>(row));
  } else {
    for (std::size_t row = 0; row < n; ++row) draw_row(row);
  }
  return ds;
}

std::pair<double, std::size_t> empirical_prob(const Dataset& ds,
                                              const std::map<NodeId, int>& targets,
                                              const std::map<NodeId, int>& given) {
  std::vector<std::pair<std::size_t, int>> g, t;
  for (const auto& [v, bit] : given) g.emplace_back(ds.column(v), bit);
  for (const auto& [v, bit] : targets) t.emplace_back(ds.column(v), bit);
  std::size_t n_given = 0, n_both = 0;
  for (std::size_t row = 0; row < ds.rows; ++row) {
    bool okg = true;
    for (const auto& [c, bit] : g)
      if (ds.at(row, c) != bit) {
        okg = false;
        break;
      }
    if (!okg) continue;
    ++n_given;
    bool okt = true;
    for (const auto& [c, bit] : t)
      if (ds.at(row, c) != bit) {
        okt = false;
        break;
      }
    if (okt) ++n_both;
  }
  if (n_given == 0) return {std::numeric_limits<double>::quiet_NaN(), 0};
  return {static_cast<double>(n_both) / static_cast<double>(n_given), n_given};
}

}  // namespace selbias
