#include "selbias/study.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace selbias {

namespace {

// Log-space odds keep rare-event probabilities away from underflow.
double odds_ratio(double p1, double p0) {
  if (!(p1 > 0.0 && p1 < 1.0 && p0 > 0.0 && p0 < 1.0))
    fail(Errc::numerical_overflow, "odds-ratio of a degenerate probability");
  const double r = std::exp((std::log(p1) - std::log1p(-p1)) - (std::log(p0) - std::log1p(-p0)));
  if (!std::isfinite(r)) fail(Errc::numerical_overflow, "odds-ratio overflow");
  return r;
}

void check_measures(const MeasureSet& ms) {
  for (double v : {ms.cor_xf, ms.cor_xr, ms.crr_xf, ms.crr_xr, ms.or_xf_selected})
    if (!(std::isfinite(v) && v > 0.0))
      fail(Errc::numerical_overflow, "non-finite measure under extreme parameters");
}

}  // namespace

void StudyParams::validate() const {
  for (double v : {alpha_x, beta_x, beta_v, gamma_f, gamma_v, nu})
    if (!std::isfinite(v)) fail(Errc::invalid_params, "non-finite study parameter");
  if (nu < 0.0) fail(Errc::invalid_params, "nu must be non-negative");
  if (offset_sign != 1 && offset_sign != -1)
    fail(Errc::invalid_params, "offset sign must be +1 or -1");
  for (double o : {alpha0(), beta0(), gamma0()})
    if (!std::isfinite(o)) fail(Errc::invalid_params, "derived offset is not finite");
}

DiscreteScm build_study_scm(const StudyParams& p, bool with_confounder) {
  p.validate();
  std::vector<NodeId> nodes{"X", "V", "F", "A", "R"};
  std::vector<std::pair<NodeId, NodeId>> edges{
      {"X", "V"}, {"X", "F"}, {"V", "F"}, {"V", "A"}, {"F", "A"}, {"F", "R"}, {"A", "R"}};
  std::map<NodeId, DiscreteScm::VariableDef> defs;
  if (with_confounder) {
    nodes.push_back("W");
    for (const char* v : {"X", "V", "F", "A"}) edges.emplace_back("W", v);
    defs["W"] = {{}, Bernoulli{0.5}};
    defs["X"] = {{"W"}, Logistic{-0.5, {1.0}}};
    defs["V"] = {{"X", "W"}, Logistic{p.alpha0(), {p.alpha_x, 1.0}}};
    defs["F"] = {{"X", "V", "W"}, Logistic{p.beta0(), {p.beta_x, p.beta_v, 1.0}}};
    defs["A"] = {{"F", "V", "W"}, Logistic{p.gamma0(), {p.gamma_f, p.gamma_v, 1.0}}};
  } else {
    defs["X"] = {{}, Bernoulli{0.5}};
    defs["V"] = {{"X"}, Logistic{p.alpha0(), {p.alpha_x}}};
    defs["F"] = {{"X", "V"}, Logistic{p.beta0(), {p.beta_x, p.beta_v}}};
    defs["A"] = {{"F", "V"}, Logistic{p.gamma0(), {p.gamma_f, p.gamma_v}}};
  }
  defs["R"] = {{"F", "A"}, AndGate{}};
  return DiscreteScm::make(build_dag(nodes, edges), defs);
}

MeasureSet closed_form(const StudyParams& p) {
  p.validate();
  const double a0 = p.alpha0(), b0 = p.beta0(), g0 = p.gamma0();
  const auto h = sigmoid;

  // P(F_x = 1): fault risk split over the two speed values.
  auto pf = [&](int x) {
    return h(b0 + p.beta_x * x + p.beta_v) * h(a0 + p.alpha_x * x) +
           h(b0 + p.beta_x * x) * h(-(a0 + p.alpha_x * x));
  };
  // P(R_x = 1) = P(F = 1, A = 1 | do(X = x)).
  auto pr = [&](int x) {
    return h(g0 + p.gamma_f + p.gamma_v) * h(b0 + p.beta_x * x + p.beta_v) *
               h(a0 + p.alpha_x * x) +
           h(g0 + p.gamma_f) * h(b0 + p.beta_x * x) * h(-(a0 + p.alpha_x * x));
  };
  // P(A = 1 | X = x): both fault values contribute.
  auto pa = [&](int x) {
    return pr(x) + h(g0 + p.gamma_v) * h(-(b0 + p.beta_x * x + p.beta_v)) * h(a0 + p.alpha_x * x) +
           h(g0) * h(-(b0 + p.beta_x * x)) * h(-(a0 + p.alpha_x * x));
  };
  auto pf_sel = [&](int x) { return pr(x) / pa(x); };

  MeasureSet ms;
  ms.cor_xf = odds_ratio(pf(1), pf(0));
  ms.cor_xr = odds_ratio(pr(1), pr(0));
  ms.crr_xf = pf(1) / pf(0);
  ms.crr_xr = pr(1) / pr(0);
  ms.or_xf_selected = odds_ratio(pf_sel(1), pf_sel(0));
  ms.prev_f = 0.5 * (pf(0) + pf(1));
  ms.prev_r = 0.5 * (pr(0) + pr(1));
  ms.prev_a = 0.5 * (pa(0) + pa(1));
  check_measures(ms);
  return ms;
}

MeasureSet engine_measures(const StudyParams& p) {
  const DiscreteScm m = build_study_scm(p, false);
  const ProbTable t = joint(m);
  // X is exogenous, so conditioning on X equals intervening on it.
  auto pf = [&](int x) { return prob(t, {{"F", 1}}, {{"X", x}}); };
  auto pr = [&](int x) { return prob(t, {{"R", 1}}, {{"X", x}}); };
  auto pf_sel = [&](int x) { return prob(t, {{"F", 1}}, {{"X", x}, {"A", 1}}); };

  MeasureSet ms;
  ms.cor_xf = odds_ratio(pf(1), pf(0));
  ms.cor_xr = odds_ratio(pr(1), pr(0));
  ms.crr_xf = pf(1) / pf(0);
  ms.crr_xr = pr(1) / pr(0);
  ms.or_xf_selected = odds_ratio(pf_sel(1), pf_sel(0));
  ms.prev_f = prob(t, {{"F", 1}});
  ms.prev_r = prob(t, {{"R", 1}});
  ms.prev_a = prob(t, {{"A", 1}});
  check_measures(ms);
  return ms;
}

MeasureSet monte_carlo_measures(const StudyParams& p, std::size_t n, std::uint64_t seed) {
  const DiscreteScm m = build_study_scm(p, false);
  const Dataset ds = sample(m, n, seed);
  auto est = [&](const std::map<NodeId, int>& tgt, const std::map<NodeId, int>& giv) {
    const auto [v, cnt] = empirical_prob(ds, tgt, giv);
    if (cnt == 0 || !(v > 0.0 && v < 1.0))
      fail(Errc::numerical_overflow, "empty or degenerate cell in the sampled data");
    return v;
  };
  auto pf = [&](int x) { return est({{"F", 1}}, {{"X", x}}); };
  auto pr = [&](int x) { return est({{"R", 1}}, {{"X", x}}); };
  auto pf_sel = [&](int x) { return est({{"F", 1}}, {{"X", x}, {"A", 1}}); };

  MeasureSet ms;
  ms.cor_xf = odds_ratio(pf(1), pf(0));
  ms.cor_xr = odds_ratio(pr(1), pr(0));
  ms.crr_xf = pf(1) / pf(0);
  ms.crr_xr = pr(1) / pr(0);
  ms.or_xf_selected = odds_ratio(pf_sel(1), pf_sel(0));
  ms.prev_f = empirical_prob(ds, {{"F", 1}}).first;
  ms.prev_r = empirical_prob(ds, {{"R", 1}}).first;
  ms.prev_a = empirical_prob(ds, {{"A", 1}}).first;
  return ms;
}

namespace {

template <typename PointFn>
std::vector<SweepRow> run_sweep(const std::vector<StudyParams>& grid, Execution exec,
                                PointFn&& point) {
  if (grid.empty()) fail(Errc::empty_grid, "sweep grid is empty");
  std::vector<SweepRow> rows(grid.size());
  auto one = [&](std::size_t i) {
    rows[i].params = grid[i];
    try {
      rows[i].measures = point(grid[i], i);
      rows[i].bias_ratio = rows[i].measures.or_xf_selected / rows[i].measures.cor_xf;
      rows[i].ok = true;
    } catch (const Error& e) {
      rows[i].ok = false;
      rows[i].error = e.what();
      rows[i].bias_ratio = std::numeric_limits<double>::quiet_NaN();
    }
  };
  if (exec == Execution::parallel) {
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(grid.size()); ++i)
      one(static_cast<std::size_t>(i));
  } else {
    for (std::size_t i = 0; i < grid.size(); ++i) one(i);
  }
  return rows;
}

}  // namespace

std::vector<SweepRow> sweep(const std::vector<StudyParams>& grid, Execution exec) {
  return run_sweep(grid, exec, [](const StudyParams& p, std::size_t) { return closed_form(p); });
}

std::vector<SweepRow> sweep_monte_carlo(const std::vector<StudyParams>& grid, std::size_t n,
                                        std::uint64_t seed) {
  return run_sweep(grid, Execution::parallel, [&](const StudyParams& p, std::size_t i) {
    return monte_carlo_measures(p, n, seed + i);
  });
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out =
      "alpha_x,beta_x,beta_v,gamma_f,gamma_v,nu,offset_sign,"
      "cor_xf,cor_xr,or_xf_sel,bias_ratio,prev_f,prev_r\n";
  char buf[64];
  auto put = [&](double v, char sep) {
    std::snprintf(buf, sizeof buf, "%.12g", v);
    out += buf;
    out += sep;
  };
  for (const SweepRow& r : rows) {
    const StudyParams& p = r.params;
    put(p.alpha_x, ',');
    put(p.beta_x, ',');
    put(p.beta_v, ',');
    put(p.gamma_f, ',');
    put(p.gamma_v, ',');
    put(p.nu, ',');
    std::snprintf(buf, sizeof buf, "%d", p.offset_sign);
    out += buf;
    out += ',';
    const double nan = std::numeric_limits<double>::quiet_NaN();
    put(r.ok ? r.measures.cor_xf : nan, ',');
    put(r.ok ? r.measures.cor_xr : nan, ',');
    put(r.ok ? r.measures.or_xf_selected : nan, ',');
    put(r.bias_ratio, ',');
    put(r.ok ? r.measures.prev_f : nan, ',');
    put(r.ok ? r.measures.prev_r : nan, '\n');
  }
  return out;
}

double approx_error(const StudyParams& p) {
  const MeasureSet ms = closed_form(p);
  return std::abs(ms.cor_xr / ms.cor_xf - 1.0);
}

PafResult paf(const DiscreteScm& m, const NodeId& x, const NodeId& r, const std::set<NodeId>& w) {
  if (x == r || w.count(x) || w.count(r))
    fail(Errc::invalid_query, "adjustment set must be disjoint from exposure and outcome");
  std::vector<NodeId> vars{x, r};
  vars.insert(vars.end(), w.begin(), w.end());
  const ProbTable t = marginal(joint(m), vars);
  const std::size_t kw = w.size();
  const std::size_t nw = std::size_t{1} << kw;
  const auto& mass = t.mass();

  const double p_r1 = prob(t, {{r, 1}});
  if (p_r1 <= 0.0) fail(Errc::positivity_violation, "outcome '" + r + "' never occurs");

  PafResult out;
  double sum_all = 0.0, sum_exposed = 0.0, sum_exposed_or = 0.0;
  for (std::size_t wi = 0; wi < nw; ++wi) {
    auto cell = [&](std::size_t xb, std::size_t rb) {
      return mass[(xb << (kw + 1)) | (rb << kw) | wi];
    };
    const double pw = cell(0, 0) + cell(0, 1) + cell(1, 0) + cell(1, 1);
    if (pw == 0.0) continue;
    const double px1 = (cell(1, 0) + cell(1, 1)) / pw;
    if (!(px1 > 0.0 && px1 < 1.0))
      fail(Errc::positivity_violation, "exposure '" + x + "' is degenerate in a stratum");
    const double risk1 = cell(1, 1) / (cell(1, 0) + cell(1, 1));
    const double risk0 = cell(0, 1) / (cell(0, 0) + cell(0, 1));
    if (risk0 <= 0.0 || risk1 <= 0.0)
      fail(Errc::positivity_violation, "outcome '" + r + "' has a zero-risk stratum");

    PafStratum st;
    st.w_bits.resize(kw);
    for (std::size_t j = 0; j < kw; ++j) st.w_bits[j] = (wi >> (kw - 1 - j)) & 1u;
    st.share[0] = cell(0, 1) / p_r1;
    st.share[1] = cell(1, 1) / p_r1;
    st.risk_ratio[0] = 1.0;
    st.risk_ratio[1] = risk1 / risk0;
    st.odds_ratio = odds_ratio(risk1, risk0);
    out.components.push_back(st);

    sum_all += st.share[0] / st.risk_ratio[0] + st.share[1] / st.risk_ratio[1];
    sum_exposed += st.share[1] / st.risk_ratio[1];
    sum_exposed_or += st.share[1] / st.odds_ratio;
  }

  const ProbTable t0 = joint(intervene(m, {{x, 0}}));
  const double p_r1_do0 = prob(t0, {{r, 1}});
  out.form_definition = (p_r1 - p_r1_do0) / p_r1;
  out.form_complement = 1.0 - sum_all;
  const double px1_given_r = prob(t, {{x, 1}}, {{r, 1}});
  out.form_exposed = px1_given_r - sum_exposed;
  out.paf_exact = out.form_definition;
  out.paf_approx = px1_given_r - sum_exposed_or;
  return out;
}

DiscreteScm chain_scm(double exposure_coefficient) {
  const Dag g = build_dag({"X", "A", "R"}, {{"X", "A"}, {"A", "R"}});
  std::map<NodeId, DiscreteScm::VariableDef> defs;
  defs["X"] = {{}, Bernoulli{0.5}};
  defs["A"] = {{"X"}, Logistic{-1.0, {exposure_coefficient}}};
  defs["R"] = {{"A"}, Logistic{-0.5, {2.0}}};
  return DiscreteScm::make(g, defs);
}

namespace {

double chain_gap(const DiscreteScm& m, double* ace_out) {
  const ProbTable t = joint(m);
  const double p_r1_do = prob(joint(intervene(m, {{"X", 1}})), {{"R", 1}});
  const double p_r0_do = prob(joint(intervene(m, {{"X", 0}})), {{"R", 1}});
  // selection S equals A: sum_s P(R=1 | S=s) P(S=s)
  double mixture = 0.0;
  for (int s : {0, 1}) mixture += prob(t, {{"R", 1}}, {{"A", s}}) * prob(t, {{"A", s}});
  if (ace_out) *ace_out = p_r1_do - p_r0_do;
  return p_r1_do - mixture;
}

}  // namespace

DemoReport appendix_d_demo() {
  DemoReport rep;
  const DiscreteScm m = chain_scm(2.0);
  rep.difference = chain_gap(m, &rep.ace);
  rep.p_r1_do = prob(joint(intervene(m, {{"X", 1}})), {{"R", 1}});
  rep.mixture = rep.p_r1_do - rep.difference;
  rep.ace_adjusted = adjusted_effect(m, "X", "R", {}, EffectScale::risk_difference).value;
  rep.zeroed_difference = chain_gap(chain_scm(0.0), nullptr);
  return rep;
}

CfReport cf_independence_check(const StudyParams& p) {
  const DiscreteScm m = build_study_scm(p, true);
  const CfJoint cf = counterfactual_joint(m, "X", {"X", "W", "A", "R"});
  const ProbTable& t = cf.combined;

  CfReport rep;
  rep.coupled_violation[0] = independence_violation(t, {"R@0"}, {"X"}, {"W", "A@0"});
  rep.coupled_violation[1] = independence_violation(t, {"R@1"}, {"X"}, {"W", "A@1"});
  rep.naive_violation = std::max(independence_violation(t, {"R@0"}, {"X"}, {"W", "A"}),
                                 independence_violation(t, {"R@1"}, {"X"}, {"W", "A"}));
  for (int w : {0, 1}) {
    for (int x : {0, 1}) {
      const std::string ax = x == 1 ? "A@1" : "A@0";
      const std::string rx = x == 1 ? "R@1" : "R@0";
      const double lhs = prob(t, {{"R", 1}}, {{"X", x}, {"W", w}, {"A", 1}});
      const double rhs = prob(t, {{rx, 1}}, {{"W", w}, {ax, 1}});
      rep.eq_selected_max_diff = std::max(rep.eq_selected_max_diff, std::abs(lhs - rhs));
    }
  }
  return rep;
}

}  // namespace selbias
