#pragma once

#include <string>
#include <vector>

#include "selbias/scm.hpp"

namespace selbias {

/// Parameters of the alcohol/fault/severity generative model. The derived
/// intercepts center each mechanism; with offset_sign = +1 the rarity
/// parameter nu enters the intercepts literally as -(... - nu)/2, which
/// pushes event probabilities toward one, while the default -1 subtracts
/// nu and makes fault and accident rare.
struct StudyParams {
  double alpha_x = 0.0;
  double beta_x = 0.0;
  double beta_v = 1.0;
  double gamma_f = 4.0;
  double gamma_v = 0.0;
  double nu = 13.0;
  int offset_sign = -1;

  double alpha0() const { return -alpha_x / 2.0; }
  double beta0() const { return -(beta_x + beta_v - offset_sign * nu) / 2.0; }
  double gamma0() const { return -(gamma_f + gamma_v - offset_sign * nu) / 2.0; }

  void validate() const;
};

/// Causal and associational measures of the model: causal odds-ratios and
/// risk-ratios of exposure on fault F and responsibility R, the
/// associational odds-ratio of (X, F) on the selected slice A=1, and the
/// observational prevalences.
struct MeasureSet {
  double cor_xf = 0.0;
  double cor_xr = 0.0;
  double crr_xf = 0.0;
  double crr_xr = 0.0;
  double or_xf_selected = 0.0;
  double prev_f = 0.0;
  double prev_r = 0.0;
  double prev_a = 0.0;
};

/// Engine form of the generative model: X, V (speed), F (fault), A (severe
/// accident), R = F x A. With the confounder variant, a fair-coin W feeds
/// X, V, F and A with unit coefficients and X's mechanism becomes
/// logistic(-1/2; W) so the exposure stays balanced.
DiscreteScm build_study_scm(const StudyParams& p, bool with_confounder);

/// Closed forms of P(F_x=1), P(R_x=1) and P(F=1 | X=x, A=1), assembled into
/// the measure set without touching the enumeration engine.
MeasureSet closed_form(const StudyParams& p);

/// Same measures computed through joint() / prob() on build_study_scm;
/// cross-checks the closed forms.
MeasureSet engine_measures(const StudyParams& p);

/// Monte Carlo estimates of the measures from n sampled rows.
MeasureSet monte_carlo_measures(const StudyParams& p, std::size_t n, std::uint64_t seed);

struct SweepRow {
  StudyParams params;
  MeasureSet measures;
  double bias_ratio = 0.0;  // or_xf_selected / cor_xf
  bool ok = false;
  std::string error;
};

/// One row per grid point, in grid order regardless of scheduling.
/// Per-point failures are flagged on the row, never aborted.
std::vector<SweepRow> sweep(const std::vector<StudyParams>& grid,
                            Execution exec = Execution::parallel);
std::vector<SweepRow> sweep_monte_carlo(const std::vector<StudyParams>& grid, std::size_t n,
                                        std::uint64_t seed);

/// CSV with the fixed header; 12 significant digits, '.' decimal
/// separator, LF line endings.
std::string sweep_csv(const std::vector<SweepRow>& rows);

/// Relative error |COR(X,R)/COR(X,F) - 1| of the rare-event approximation.
double approx_error(const StudyParams& p);

struct PafStratum {
  std::vector<int> w_bits;
  double share[2] = {0.0, 0.0};       // p_{i,w} = P(X=i, W=w | R=1)
  double risk_ratio[2] = {0.0, 0.0};  // RR_{i,w}, adjusted within the stratum
  double odds_ratio = 0.0;            // OR(X, R | W=w), the RR surrogate
};

struct PafResult {
  double paf_exact = 0.0;       // definition form, interventional P(R_0=1)
  double form_definition = 0.0;
  double form_complement = 0.0; // 1 - sum_{i,w} p_{i,w} / RR_{i,w}
  double form_exposed = 0.0;    // P(X=1|R=1) - sum_w p_{1,w} / RR_{1,w}
  double paf_approx = 0.0;      // odds-ratios substituted for the risk-ratios
  std::vector<PafStratum> components;
};

/// Population attributable fraction of exposure x on outcome r, adjusted
/// for w. Requires positivity in every positive-mass stratum.
PafResult paf(const DiscreteScm& m, const NodeId& x, const NodeId& r, const std::set<NodeId>& w);

/// The exposure -> accident -> responsibility chain with selection equal to
/// the accident indicator.
DiscreteScm chain_scm(double exposure_coefficient);

/// Demonstrates that conditioning on the selection slice is not ignorable:
/// P(R_1=1) differs from sum_s P(R=1|S=s) P(S=s) on the chain, and the gap
/// closes when the exposure coefficient is zeroed.
struct DemoReport {
  double p_r1_do = 0.0;
  double mixture = 0.0;
  double difference = 0.0;
  double ace = 0.0;
  double ace_adjusted = 0.0;      // back-door cross-check of the ACE
  double zeroed_difference = 0.0;
};

DemoReport appendix_d_demo();

/// Counterfactual-coupling checks on the confounder-augmented model:
/// R_x is independent of X given (W, A_x) and the selected-slice equality
/// P(R=1 | X=x, W, A=1) = P(R_x=1 | W, A_x=1) holds, while conditioning on
/// the actual A is violated.
struct CfReport {
  double coupled_violation[2] = {0.0, 0.0};  // R@x _||_ X | (W, A@x), x = 0, 1
  double eq_selected_max_diff = 0.0;
  double naive_violation = 0.0;              // worst R@x _||_ X | (W, A)
};

CfReport cf_independence_check(const StudyParams& p);

}  // namespace selbias
