#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <functional>

#include "selbias/scm.hpp"
#include "selbias/study.hpp"
#include "test_support.hpp"

using namespace selbias;

namespace {

double h(double x) { return 1.0 / (1.0 + std::exp(-x)); }

DiscreteScm coin_and_gate() {
  const Dag g = build_dag({"X", "Y"}, {{"X", "Y"}});
  return DiscreteScm::make(g, {{"X", {{}, Bernoulli{0.5}}}, {"Y", {{"X"}, AndGate{}}}});
}

StudyParams mc_point() {
  StudyParams p;
  p.alpha_x = 1.0;
  p.beta_x = 1.0;
  p.gamma_v = 1.0;
  p.nu = 0.0;
  return p;
}

}  // namespace

TEST_CASE("model validation") {
  const Dag g = build_dag({"X", "Y"}, {{"X", "Y"}});
  auto make = [&](DiscreteScm::VariableDef xdef, DiscreteScm::VariableDef ydef) {
    DiscreteScm::make(g, {{"X", xdef}, {"Y", ydef}});
  };
  CHECK_NOTHROW(make({{}, Bernoulli{0.3}}, {{"X"}, Table{{0.2, 0.9}}}));
  CHECK_THROWS_AS(make({{}, Bernoulli{1.5}}, {{"X"}, AndGate{}}), Error);
  CHECK_THROWS_AS(make({{}, Bernoulli{0.5}}, {{"X"}, Table{{0.2}}}), Error);
  CHECK_THROWS_AS(make({{}, Bernoulli{0.5}}, {{"X"}, Logistic{0.0, {}}}), Error);
  CHECK_THROWS_AS(make({{}, Bernoulli{0.5}}, {{}, Bernoulli{0.5}}), Error);  // parents dropped
  CHECK_THROWS_AS(make({{}, AndGate{}}, {{"X"}, AndGate{}}), Error);         // gate without parents
  CHECK_THROWS_AS(DiscreteScm::make(g, {{"X", {{}, Bernoulli{0.5}}}}), Error);
}

TEST_CASE("joint of a single coin") {
  const Dag g = build_dag({"X"}, {});
  const ProbTable t = joint(DiscreteScm::make(g, {{"X", {{}, Bernoulli{0.5}}}}));
  CHECK(t.mass()[0] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(t.mass()[1] == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("joint of a coin feeding a deterministic gate") {
  const ProbTable t = joint(coin_and_gate());
  CHECK(t.probability_of({{"X", 1}, {"Y", 1}}) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(t.probability_of({{"X", 0}, {"Y", 1}}) == 0.0);
}

TEST_CASE("joint mass is the product of the mechanism terms") {
  StudyParams p;
  p.alpha_x = 2.0;
  p.beta_x = 1.0;
  p.gamma_v = 2.0;
  const DiscreteScm m = build_study_scm(p, false);
  const ProbTable t = joint(m);
  const double a0 = -1.0, b0 = -7.5, g0 = -9.5;
  // assignment X=1, V=0, F=1, A=1, R=1
  const double expect = 0.5 * (1.0 - h(a0 + 2.0)) * h(b0 + 1.0) * h(g0 + 4.0) * 1.0;
  CHECK(t.probability_of({{"X", 1}, {"V", 0}, {"F", 1}, {"A", 1}, {"R", 1}}) ==
        doctest::Approx(expect).epsilon(1e-12));
  // and an assignment violating R = F x A carries no mass
  CHECK(t.probability_of({{"X", 1}, {"V", 0}, {"F", 1}, {"A", 1}, {"R", 0}}) == 0.0);

  double total = 0.0;
  for (double v : t.mass()) total += v;
  CHECK(std::abs(total - 1.0) < 1e-12);
}

TEST_CASE("parallel and serial enumeration agree bit for bit") {
  SplitMix64 rng{555};
  for (int rep = 0; rep < 10; ++rep) {
    const Dag g = oracle::random_dag(rng, 6);
    const DiscreteScm m = oracle::random_table_scm(g, rng);
    CHECK(joint(m, Execution::parallel).mass() == joint(m, Execution::serial).mass());
  }
  // a wider model exercises the parallel kernel properly
  std::vector<NodeId> nodes;
  std::map<NodeId, DiscreteScm::VariableDef> defs;
  for (int i = 0; i < 14; ++i) {
    nodes.push_back("N" + std::to_string(i));
    defs[nodes.back()] = {{}, Bernoulli{0.5 + 0.02 * i}};
  }
  const DiscreteScm wide = DiscreteScm::make(build_dag(nodes, {}), defs);
  CHECK(joint(wide, Execution::parallel).mass() == joint(wide, Execution::serial).mass());
}

TEST_CASE("enumeration is capped") {
  std::vector<NodeId> nodes;
  std::map<NodeId, DiscreteScm::VariableDef> defs;
  for (int i = 0; i < 21; ++i) {
    nodes.push_back("N" + std::to_string(i));
    defs[nodes.back()] = {{}, Bernoulli{0.5}};
  }
  const DiscreteScm m = DiscreteScm::make(build_dag(nodes, {}), defs);
  try {
    joint(m);
    FAIL("expected TooLarge");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::too_large);
  }
}

TEST_CASE("intervening on a root equals conditioning on it") {
  SplitMix64 rng{808};
  const Dag g = build_dag({"U", "X", "Y"}, {{"U", "Y"}, {"X", "Y"}});
  const DiscreteScm m = oracle::random_table_scm(g, rng);
  const ProbTable obs = joint(m);
  const ProbTable done = joint(intervene(m, {{"X", 1}}));
  for (int u : {0, 1})
    for (int y : {0, 1})
      CHECK(prob(done, {{"U", u}, {"Y", y}}) ==
            doctest::Approx(prob(obs, {{"U", u}, {"Y", y}}, {{"X", 1}})).epsilon(1e-12));
}

TEST_CASE("forcing the exposure moves the speed distribution") {
  StudyParams p;
  p.alpha_x = 2.0;
  p.beta_x = 1.0;
  p.gamma_v = 1.0;
  const DiscreteScm m = build_study_scm(p, false);
  const ProbTable t1 = joint(intervene(m, {{"X", 1}}));
  CHECK(prob(t1, {{"V", 1}}) == doctest::Approx(h(p.alpha0() + p.alpha_x)).epsilon(1e-12));
  const ProbTable t0 = joint(intervene(m, {{"X", 0}}));
  CHECK(prob(t0, {{"V", 1}}) == doctest::Approx(h(p.alpha0())).epsilon(1e-12));
}

TEST_CASE("intervening on every variable yields a point mass") {
  const DiscreteScm m = coin_and_gate();
  const ProbTable t = joint(intervene(m, {{"X", 1}, {"Y", 0}}));
  CHECK(t.probability_of({{"X", 1}, {"Y", 0}}) == 1.0);
  CHECK_THROWS_AS(intervene(m, {{"Q", 1}}), Error);
}

TEST_CASE("surgery agrees with the truncated factorization") {
  SplitMix64 rng{1123};
  for (int rep = 0; rep < 20; ++rep) {
    const Dag g = oracle::random_dag(rng, 6);
    const DiscreteScm m = oracle::random_table_scm(g, rng);
    const auto& nodes = g.nodes();
    const std::map<NodeId, int> clamp{{nodes[rng.next() % nodes.size()],
                                       static_cast<int>(rng.next() % 2)}};
    const ProbTable t = joint(intervene(m, clamp));
    const std::size_t n = m.variable_count();
    for (std::size_t idx = 0; idx < t.mass().size(); ++idx) {
      std::vector<int> bits(n);
      for (std::size_t v = 0; v < n; ++v) bits[v] = (idx >> (n - 1 - v)) & 1u;
      CHECK(t.mass()[idx] ==
            doctest::Approx(oracle::truncated_factor_mass(m, clamp, bits)).epsilon(1e-12));
    }
  }
}

TEST_CASE("conditional probabilities") {
  const ProbTable t = joint(coin_and_gate());
  CHECK(prob(t, {{"Y", 1}}) == doctest::Approx(0.5).epsilon(1e-15));  // one-parent and-gate copies
  CHECK_THROWS_AS(prob(t, {{"X", 1}}, {{"X", 0}, {"Y", 1}}), Error);

  // the selected-slice fault probability matches its closed form
  StudyParams p;
  p.alpha_x = 1.0;
  p.beta_x = 2.0;
  p.gamma_v = 1.0;
  const ProbTable tp = joint(build_study_scm(p, false));
  const double a0 = p.alpha0(), b0 = p.beta0(), g0 = p.gamma0();
  for (int x : {0, 1}) {
    const double num = h(g0 + 4.0 + 1.0) * h(b0 + 2.0 * x + 1.0) * h(a0 + x) +
                       h(g0 + 4.0) * h(b0 + 2.0 * x) * h(-(a0 + x));
    const double den = num + h(g0 + 1.0) * (1.0 - h(b0 + 2.0 * x + 1.0)) * h(a0 + x) +
                       h(g0) * (1.0 - h(b0 + 2.0 * x)) * h(-(a0 + x));
    CHECK(prob(tp, {{"F", 1}}, {{"X", x}, {"A", 1}}) ==
          doctest::Approx(num / den).epsilon(1e-12));
  }
}

TEST_CASE("back-door adjustment") {
  SplitMix64 rng{7321};

  // y independent of x given w: no x -> y edge
  const Dag g0 = build_dag({"W", "X", "Y"}, {{"W", "X"}, {"W", "Y"}});
  const DiscreteScm m0 = oracle::random_table_scm(g0, rng);
  CHECK(adjusted_effect(m0, "X", "Y", {"W"}, EffectScale::risk_difference).value ==
        doctest::Approx(0.0).epsilon(1e-12));
  CHECK(adjusted_effect(m0, "X", "Y", {"W"}, EffectScale::risk_ratio).value ==
        doctest::Approx(1.0).epsilon(1e-12));

  // two routes to the causal risk difference on the confounded graph
  const Dag g1 = build_dag({"W", "X", "Y"}, {{"W", "X"}, {"W", "Y"}, {"X", "Y"}});
  const DiscreteScm m1 = oracle::random_table_scm(g1, rng);
  const double via_adjust = adjusted_effect(m1, "X", "Y", {"W"}, EffectScale::risk_difference).value;
  const double via_surgery = prob(joint(intervene(m1, {{"X", 1}})), {{"Y", 1}}) -
                             prob(joint(intervene(m1, {{"X", 0}})), {{"Y", 1}});
  CHECK(via_adjust == doctest::Approx(via_surgery).epsilon(1e-12));

  // odds-ratio scale reports one value per stratum
  const AdjustedEffect orper = adjusted_effect(m1, "X", "Y", {"W"}, EffectScale::odds_ratio);
  CHECK(orper.per_stratum.size() == 2);
  const AdjustedEffect single = adjusted_effect(m1, "X", "Y", {}, EffectScale::odds_ratio);
  CHECK(single.per_stratum.size() == 1);
  CHECK(single.value == single.per_stratum.begin()->second);
}

TEST_CASE("ACE of the study model agrees across computation paths") {
  const DiscreteScm m = build_study_scm(mc_point(), false);
  const double via_adjust = adjusted_effect(m, "X", "R", {}, EffectScale::risk_difference).value;
  const double via_surgery = prob(joint(intervene(m, {{"X", 1}})), {{"R", 1}}) -
                             prob(joint(intervene(m, {{"X", 0}})), {{"R", 1}});
  CHECK(via_adjust == doctest::Approx(via_surgery).epsilon(1e-12));
}

TEST_CASE("a deterministic exposure violates positivity") {
  const Dag g = build_dag({"W", "X", "Y"}, {{"W", "X"}, {"X", "Y"}});
  const DiscreteScm m = DiscreteScm::make(g, {{"W", {{}, Bernoulli{0.5}}},
                                              {"X", {{"W"}, AndGate{}}},
                                              {"Y", {{"X"}, Table{{0.2, 0.7}}}}});
  try {
    adjusted_effect(m, "X", "Y", {"W"}, EffectScale::risk_difference);
    FAIL("expected PositivityViolation");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::positivity_violation);
  }
}

TEST_CASE("independence oracle on the study models") {
  StudyParams case_i = mc_point();
  case_i.gamma_v = 0.0;  // severity ignores speed: exposure and accident decouple given fault
  CHECK(cond_independent(build_study_scm(case_i, false), {"X"}, {"A"}, {"F"}, 1e-10));

  const StudyParams case_ii = mc_point();
  CHECK_FALSE(cond_independent(build_study_scm(case_ii, false), {"X"}, {"A"}, {"F"}, 1e-10));
}

TEST_CASE("d-separation implies exact conditional independence") {
  SplitMix64 rng{60101};
  int separated = 0;
  for (int rep = 0; rep < 30; ++rep) {
    const Dag g = oracle::random_dag(rng, 6);
    const DiscreteScm m = oracle::random_table_scm(g, rng);
    const ProbTable t = joint(m);
    const auto& nodes = g.nodes();
    const int n = static_cast<int>(nodes.size());
    for (int ai = 0; ai < n; ++ai)
      for (int bi = ai + 1; bi < n; ++bi) {
        std::vector<NodeId> rest;
        for (int k = 0; k < n; ++k)
          if (k != ai && k != bi) rest.push_back(nodes[k]);
        for (std::uint32_t mask = 0; mask < (1u << rest.size()); ++mask) {
          std::set<NodeId> z;
          for (std::size_t k = 0; k < rest.size(); ++k)
            if ((mask >> k) & 1u) z.insert(rest[k]);
          if (!d_separated(g, {nodes[ai]}, {nodes[bi]}, z)) continue;
          ++separated;
          CHECK(independence_violation(t, {nodes[ai]}, {nodes[bi]}, z) <= 1e-10);
        }
      }
  }
  CHECK(separated > 100);
}

TEST_CASE("counterfactual copies of an untouched variable collapse") {
  // U has no directed path from X, so its copies match the actual value
  const Dag g = build_dag({"X", "U", "Y"}, {{"X", "Y"}, {"U", "Y"}});
  const DiscreteScm m = DiscreteScm::make(g, {{"X", {{}, Bernoulli{0.5}}},
                                              {"U", {{}, Bernoulli{0.3}}},
                                              {"Y", {{"X", "U"}, Table{{0.1, 0.4, 0.6, 0.9}}}}});
  const CfJoint cf = counterfactual_joint(m, "X", {"U"});
  CHECK(prob(cf.combined, {{"U@0", 1}}, {{"U", 1}}) == 1.0);
  CHECK(prob(cf.combined, {{"U@1", 0}}, {{"U", 0}}) == 1.0);
}

TEST_CASE("coherence: the factual world matches its own counterfactual") {
  const DiscreteScm m = build_study_scm(mc_point(), true);
  const CfJoint cf = counterfactual_joint(m, "X", {"X", "R", "A"});
  CHECK(prob(cf.combined, {{"R@1", 1}}, {{"X", 1}, {"R", 1}}) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(prob(cf.combined, {{"R@1", 0}}, {{"X", 1}, {"R", 0}}) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(prob(cf.combined, {{"A@0", 1}}, {{"X", 0}, {"A", 1}}) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("counterfactual marginals reproduce the observational and do joints") {
  const DiscreteScm m = build_study_scm(mc_point(), true);
  const std::set<NodeId> keep{"X", "W", "A", "R"};
  const CfJoint cf = counterfactual_joint(m, "X", keep);

  const ProbTable obs = marginal(joint(m), cf.actual);
  const ProbTable obs_cf = marginal(cf.combined, cf.actual);
  for (std::size_t i = 0; i < obs.mass().size(); ++i)
    CHECK(obs_cf.mass()[i] == doctest::Approx(obs.mass()[i]).epsilon(1e-12));

  for (int x : {0, 1}) {
    const ProbTable done = marginal(joint(intervene(m, {{"X", x}})), {"W", "A", "R"});
    const ProbTable block = marginal(cf.combined, x == 0 ? cf.cf_zero : cf.cf_one);
    for (std::size_t i = 0; i < done.mass().size(); ++i)
      CHECK(block.mass()[i] == doctest::Approx(done.mass()[i]).epsilon(1e-12));
  }
}

TEST_CASE("counterfactual enumeration is capped") {
  std::vector<NodeId> nodes;
  std::map<NodeId, DiscreteScm::VariableDef> defs;
  for (int i = 0; i < 13; ++i) {
    nodes.push_back("N" + std::to_string(i));
    defs[nodes.back()] = {{}, Bernoulli{0.5}};
  }
  const DiscreteScm m = DiscreteScm::make(build_dag(nodes, {}), defs);
  CHECK_THROWS_AS(counterfactual_joint(m, "N0", {"N1"}), Error);
}

TEST_CASE("sampling is reproducible and execution-independent") {
  const DiscreteScm m = build_study_scm(mc_point(), false);
  const Dataset a = sample(m, 5000, 99, Execution::parallel);
  const Dataset b = sample(m, 5000, 99, Execution::parallel);
  const Dataset c = sample(m, 5000, 99, Execution::serial);
  CHECK(a.data == b.data);
  CHECK(a.data == c.data);
  const Dataset d = sample(m, 5000, 100, Execution::parallel);
  CHECK(a.data != d.data);
}

TEST_CASE("a sampled coin lands inside the binomial band") {
  const Dag g = build_dag({"X"}, {});
  const DiscreteScm m = DiscreteScm::make(g, {{"X", {{}, Bernoulli{0.5}}}});
  const std::size_t n = 1000000;
  const Dataset ds = sample(m, n, 7);
  const double mean = empirical_prob(ds, {{"X", 1}}).first;
  CHECK(std::abs(mean - 0.5) <= 4.0 * std::sqrt(0.25 / static_cast<double>(n)));
}

TEST_CASE("empirical odds-ratio stays within four standard errors of exact") {
  const DiscreteScm m = build_study_scm(mc_point(), false);
  const ProbTable t = joint(m);
  auto odds = [](double p) { return p / (1.0 - p); };
  const double exact = odds(prob(t, {{"F", 1}}, {{"X", 1}, {"A", 1}})) /
                       odds(prob(t, {{"F", 1}}, {{"X", 0}, {"A", 1}}));
  const Dataset ds = sample(m, 1000000, 2024);
  double cell[2][2];
  for (int x : {0, 1})
    for (int f : {0, 1}) {
      const auto [p, cnt] = empirical_prob(ds, {{"F", f}, {"X", x}}, {{"A", 1}});
      cell[x][f] = p * static_cast<double>(cnt);
    }
  const double or_hat = (cell[1][1] * cell[0][0]) / (cell[1][0] * cell[0][1]);
  const double se = std::sqrt(1.0 / cell[1][1] + 1.0 / cell[1][0] + 1.0 / cell[0][1] +
                              1.0 / cell[0][0]);
  CHECK(std::abs(std::log(or_hat) - std::log(exact)) <= 4.0 * se);
}

TEST_CASE("Monte Carlo stays inside the four-sigma band almost always") {
  const DiscreteScm m = build_study_scm(mc_point(), false);
  const ProbTable t = joint(m);
  const double p_exact = prob(t, {{"F", 1}}, {{"X", 1}});
  const std::size_t n = 20000;
  int inside = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const Dataset ds = sample(m, n, seed);
    const auto [p_hat, cnt] = empirical_prob(ds, {{"F", 1}}, {{"X", 1}});
    const double band = 4.0 * std::sqrt(p_exact * (1.0 - p_exact) / static_cast<double>(cnt));
    if (std::abs(p_hat - p_exact) <= band) ++inside;
  }
  CHECK(inside >= 99);
}
