#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <random>

#include "oracle_utils.hpp"
#include "perfclass/solver.hpp"

using namespace perfclass;
using Catch::Approx;

namespace {

Environment example_env() { return worked_example_environment(); }

Classifier random_step(std::mt19937_64& gen, const SignalModel& s,
                       int max_k = 6) {
  Span span = signal_span(s);
  Step st;
  int k = 1 + int(uniform01(gen) * max_k);
  for (int i = 0; i < k; ++i)
    st.breaks.push_back(span.lo + uniform01(gen) * (span.hi - span.lo));
  std::sort(st.breaks.begin(), st.breaks.end());
  for (int i = 0; i <= k; ++i) st.values.push_back(uniform01(gen));
  return Classifier{st};
}

}  // namespace

TEST_CASE("gap_of_threshold matches the normal-CDF reference") {
  SignalModel s = example_env().signal;
  CHECK(gap_of_threshold(s, 0.5, ThresholdFamily::positive) ==
        Approx(0.3829249225480262).margin(1e-12));
  CHECK(gap_of_threshold(s, -0.1, ThresholdFamily::positive) ==
        Approx(0.324506101777).margin(1e-10));
  CHECK(gap_of_threshold(s, -0.1, ThresholdFamily::positive) ==
        Approx(0.325).margin(1e-3));
  CHECK(gap_of_threshold(s, -1.4, ThresholdFamily::negative) ==
        Approx(-0.072559123309).margin(1e-10));
  // both tails vanish
  CHECK(std::abs(gap_of_threshold(s, -40.0, ThresholdFamily::positive)) <=
        1e-8);
  CHECK(std::abs(gap_of_threshold(s, 40.0, ThresholdFamily::positive)) <= 1e-8);
  CHECK(max_threshold_gap(s) == Approx(0.3829249225480262).margin(1e-10));
}

TEST_CASE("match_prevalence finds the straddling threshold pair") {
  SignalModel s = example_env().signal;

  PrevalenceMatch m = match_prevalence(s, 0.325);
  CHECK(m.tau_l == Approx(-0.1).margin(5e-3));
  CHECK(m.tau_h == Approx(1.1).margin(5e-3));
  CHECK(m.tau_l == Approx(-0.097238071780).margin(1e-8));
  CHECK(m.tau_h == Approx(1.097238071780).margin(1e-8));
  CHECK_FALSE(m.degenerate);

  // the negative family reuses the same pair, mirrored through the gap sign
  PrevalenceMatch n = match_prevalence(s, -0.0726);
  CHECK(n.tau_l == Approx(-1.399679040918).margin(1e-8));
  CHECK(gap_of_threshold(s, n.tau_l, ThresholdFamily::negative) ==
        Approx(-0.0726).margin(1e-9));

  PrevalenceMatch d = match_prevalence(s, max_threshold_gap(s));
  CHECK(d.degenerate);
  CHECK(d.tau_l == s.tau_c);
  CHECK(d.tau_h == s.tau_c);

  try {
    match_prevalence(s, 0.9);
    FAIL("expected infeasible gap");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::infeasible_gap);
  }
  try {
    match_prevalence(s, 0.0);
    FAIL("expected zero gap");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::zero_gap);
  }
}

TEST_CASE("match_prevalence residuals and ordering over random targets") {
  SignalModel s = example_env().signal;
  double d_max = max_threshold_gap(s);
  std::mt19937_64 gen(31);
  for (int trial = 0; trial < 300; ++trial) {
    // log-uniform magnitudes down to 1e-9, both signs
    double mag = d_max * std::pow(10.0, -9.0 * uniform01(gen));
    double target = trial % 2 == 0 ? mag : -mag;
    PrevalenceMatch m = match_prevalence(s, target);
    CHECK(m.tau_l <= s.tau_c);
    CHECK(s.tau_c <= m.tau_h);
    ThresholdFamily fam =
        target > 0 ? ThresholdFamily::positive : ThresholdFamily::negative;
    CHECK(std::abs(gap_of_threshold(s, m.tau_l, fam) - target) <= 1e-9);
    CHECK(std::abs(gap_of_threshold(s, m.tau_h, fam) - target) <= 1e-9);
  }
}

TEST_CASE("optimize_family reproduces the worked-example optima") {
  Environment env = example_env();

  FamilyResult pos =
      optimize_family(env, accuracy_weights(), ThresholdFamily::positive);
  CHECK(pos.tau == Approx(-0.1).margin(0.05));
  CHECK(pos.value == Approx(0.787).margin(0.002));
  CHECK(pos.tau == Approx(-0.102173003555).margin(1e-6));
  CHECK(pos.value == Approx(0.786954913224).margin(1e-9));

  FamilyResult neg =
      optimize_family(env, accuracy_weights(), ThresholdFamily::negative);
  CHECK(neg.tau == Approx(-1.4).margin(0.05));
  CHECK(neg.tau == Approx(-1.414771136078).margin(1e-6));
  CHECK(neg.value == Approx(0.798183685818).margin(1e-9));

  // the reported value dominates the family's own sampled curve
  for (const auto& p : pos.curve) CHECK(pos.value >= p.value - 1e-12);
  for (const auto& p : neg.curve) CHECK(neg.value >= p.value - 1e-12);
  CHECK(pos.curve.size() == 2001);
}

TEST_CASE("compliance weights move the optimum to the crossing point") {
  Environment env = example_env();
  FamilyResult pos =
      optimize_family(env, compliance_weights(), ThresholdFamily::positive);
  CHECK(pos.tau == Approx(0.5).margin(1e-4));
  CHECK(pos.value == Approx(0.877914511753).margin(1e-9));
}

TEST_CASE("solve_optimal: negative threshold wins the worked example") {
  Environment env = example_env();
  SolveReport rep = solve_optimal(env, accuracy_weights());

  CHECK(rep.winner == WinnerKind::negative);
  CHECK(rep.score_monotonicity_violated);
  CHECK_FALSE(rep.guarantee_void);
  CHECK(rep.best_negative.value > rep.best_positive.value);
  CHECK(rep.best_negative.tau == Approx(-1.414771136078).margin(1e-6));
  CHECK(rep.winner_value == rep.best_negative.value);
  CHECK(std::get<NegativeThreshold>(rep.winner_rule).tau ==
        Approx(rep.best_negative.tau).margin(1e-15));

  // constant rules: rejecting everyone beats accepting everyone here
  CHECK(rep.best_constant.p == 0.0);
  CHECK(rep.best_constant.value == Approx(0.773372647623132).margin(1e-10));

  CHECK(rep.curve.size() == 2001);
  for (std::size_t i = 1; i < rep.curve.size(); ++i)
    CHECK(rep.curve[i].tau > rep.curve[i - 1].tau);
}

TEST_CASE("solve_optimal: compliance preset picks the positive rule at tau_c") {
  Environment env = example_env();
  SolveReport rep = solve_optimal(env, compliance_weights());
  CHECK(rep.winner == WinnerKind::positive);
  CHECK(rep.best_positive.tau == Approx(0.5).margin(1e-4));
  CHECK_FALSE(rep.score_monotonicity_violated);
}

TEST_CASE("solve_optimal: saturated cost law makes accept-everyone optimal") {
  // all cost mass far below any achievable gain: prevalence pins at 1 and
  // the accuracy of any rule collapses to its complier acceptance rate
  Environment env = make_environment(
      gaussian(-50.0, 1.0), 5.0, 0.0,
      make_signal_model(gaussian(0.0, 1.0), gaussian(1.0, 1.0)));
  SolveReport rep = solve_optimal(env, accuracy_weights());
  CHECK(rep.winner == WinnerKind::constant);
  CHECK(rep.best_constant.p == 1.0);
  CHECK(rep.best_constant.value == Approx(1.0).margin(1e-12));
  CHECK_FALSE(rep.score_monotonicity_violated);
}

TEST_CASE("solve_optimal flags guarantee-void weight vectors") {
  Environment env = example_env();
  SolveReport rep = solve_optimal(env, ObjectiveWeights{1.0, 0.0, 0.0, 1.0});
  CHECK(rep.guarantee_void);
  REQUIRE_FALSE(rep.notes.empty());
}

TEST_CASE("check_conditions on a threshold rule holds trivially") {
  Environment env = example_env();
  ConditionReport rep =
      check_conditions(env, PositiveThreshold{-0.1}, accuracy_weights());
  CHECK(rep.side == RemainderSide::plus);
  CHECK(rep.pivot == Approx(0.5).margin(1e-15));
  // self-comparison: the rule is its own low matched threshold, where the
  // remainders vanish and the branch holds with zero gain
  CHECK(rep.tau_l == Approx(-0.1).margin(1e-8));
  CHECK(std::abs(rep.r1_tau_l) <= 1e-9);
  CHECK(std::abs(rep.r0_tau_l) <= 1e-9);
  CHECK(std::abs(rep.payoff_gain_tau_l) <= 1e-9);
  CHECK(rep.tau_l_branch_holds);
}

TEST_CASE("check_conditions on the increasing step rule") {
  Environment env = example_env();
  Classifier c{Step{{-1.0, 1.0}, {0.2, 0.5, 0.9}}};
  ConditionReport rep = check_conditions(env, c, accuracy_weights());

  CHECK(rep.gap == Approx(0.177309435022401).margin(1e-10));
  CHECK(rep.side == RemainderSide::plus);
  CHECK(rep.prevalence == Approx(0.554305633295).margin(1e-9));
  CHECK(rep.tau_l == Approx(-0.793440111455).margin(1e-8));
  CHECK(rep.tau_h == Approx(1.793440111455).margin(1e-8));
  CHECK(rep.r1_tau_l == Approx(-0.270373750255).margin(1e-9));
  CHECK(rep.r0_tau_h == Approx(0.479414236064).margin(1e-9));
  CHECK(rep.r1_tau_l <= 1e-12);   // low matched threshold: R1 below zero
  CHECK(rep.r0_tau_h >= -1e-12);  // high matched threshold: R0 above zero

  // prevalence above the pivot: the low threshold certifies dominance
  CHECK(rep.prevalence > rep.pivot);
  CHECK(rep.tau_l_branch_holds);
  CHECK_FALSE(rep.tau_h_branch_holds);

  // the reported payoff gain equals the direct objective difference
  double direct =
      objective_value(env, PositiveThreshold{rep.tau_l}, accuracy_weights()) -
      objective_value(env, c, accuracy_weights());
  CHECK(rep.payoff_gain_tau_l == Approx(direct).margin(1e-9));
  CHECK(rep.payoff_gain_tau_l == Approx(0.029365635468).margin(1e-8));
}

TEST_CASE("check_conditions on the decreasing step rule") {
  Environment env = example_env();
  Classifier c{Step{{-1.0, 1.0}, {0.9, 0.5, 0.2}}};
  ConditionReport rep = check_conditions(env, c, accuracy_weights());

  CHECK(rep.gap == Approx(-0.156765472613874).margin(1e-10));
  CHECK(rep.side == RemainderSide::minus);
  CHECK(rep.prevalence == Approx(0.062536064700).margin(1e-9));
  CHECK(rep.r1_tau_l == Approx(0.329915890990).margin(1e-9));
  CHECK(rep.r0_tau_h == Approx(-0.454950312818).margin(1e-9));
  CHECK(rep.r1_tau_l >= -1e-12);  // minus side flips the sign pattern
  CHECK(rep.r0_tau_h <= 1e-12);

  // prevalence below the pivot: again the low threshold certifies
  CHECK(rep.prevalence < rep.pivot);
  CHECK(rep.tau_l_branch_holds);
  CHECK_FALSE(rep.tau_h_branch_holds);

  double direct =
      objective_value(env, NegativeThreshold{rep.tau_l}, accuracy_weights()) -
      objective_value(env, c, accuracy_weights());
  CHECK(rep.payoff_gain_tau_l == Approx(direct).margin(1e-9));
}

TEST_CASE("check_conditions with general weight vectors") {
  Environment env = example_env();
  Classifier c{Step{{-1.0, 1.0}, {0.2, 0.5, 0.9}}};
  const ObjectiveWeights cases[] = {
      {0.9, 0.2, 0.7, 0.1},  // aligned, pivot off one half
      {0.2, 0.8, 0.1, 0.6},  // misaligned
  };
  for (const auto& w : cases) {
    ConditionReport rep = check_conditions(env, c, w);
    CHECK(rep.pivot == Approx((w.B1 - w.B0) /
                              (w.A1 - w.A0 + w.B1 - w.B0)).margin(1e-15));
    // reported gains equal the direct payoff differences of the matched rules
    double direct_l = objective_value(env, PositiveThreshold{rep.tau_l}, w) -
                      objective_value(env, c, w);
    double direct_h = objective_value(env, PositiveThreshold{rep.tau_h}, w) -
                      objective_value(env, c, w);
    CHECK(rep.payoff_gain_tau_l == Approx(direct_l).margin(1e-9));
    CHECK(rep.payoff_gain_tau_h == Approx(direct_h).margin(1e-9));
    // the certificate always exists within the covered weight classes
    CHECK((rep.tau_l_branch_holds || rep.tau_h_branch_holds));
  }
}

TEST_CASE("check_conditions rejects degenerate inputs") {
  Environment env = example_env();
  try {
    check_conditions(env, Constant{0.5}, accuracy_weights());
    FAIL("expected zero gap");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::zero_gap);
  }
  try {
    check_conditions(env, PositiveThreshold{0.0}, compliance_weights());
    FAIL("expected degenerate objective");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::degenerate_objective);
  }
}

TEST_CASE("matched thresholds dominate every random step classifier") {
  Environment env = example_env();
  std::mt19937_64 gen(2718);
  for (int trial = 0; trial < 1000; ++trial) {
    Classifier c = random_step(gen, env.signal);
    Evaluation e = evaluate(env, c);
    if (std::abs(e.gap) <= 1e-12) continue;
    PrevalenceMatch m = match_prevalence(env.signal, e.gap);
    ThresholdFamily fam =
        e.gap > 0 ? ThresholdFamily::positive : ThresholdFamily::negative;
    double best = std::max(
        objective_value(env, threshold_rule(fam, m.tau_l), accuracy_weights()),
        objective_value(env, threshold_rule(fam, m.tau_h), accuracy_weights()));
    CHECK(best >= e.accuracy - 1e-8);

    // matched remainders agree across behaviors
    RemainderSide side =
        e.gap > 0 ? RemainderSide::plus : RemainderSide::minus;
    for (double tau : {m.tau_l, m.tau_h})
      CHECK(std::abs(remainder(c, env.signal, tau, side, 1) -
                     remainder(c, env.signal, tau, side, 0)) <= 1e-8);
  }
}

TEST_CASE("solver winner dominates 10000 random step classifiers") {
  Environment env = example_env();
  SolveReport rep = solve_optimal(env, accuracy_weights());
  std::mt19937_64 gen(99991);
  double worst_deficit = 0.0;
  for (int trial = 0; trial < 10000; ++trial) {
    Classifier c = random_step(gen, env.signal);
    double v = objective_value(env, c, accuracy_weights());
    worst_deficit = std::max(worst_deficit, v - rep.winner_value);
  }
  CHECK(worst_deficit <= 1e-8);
}
