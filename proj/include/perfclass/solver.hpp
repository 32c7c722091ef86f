#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "perfclass/classifier.hpp"
#include "perfclass/dist.hpp"
#include "perfclass/error.hpp"
#include "perfclass/model.hpp"

namespace perfclass {

enum class ThresholdFamily { positive, negative };

// Gaps below this magnitude are treated as zero throughout the solver and
// the verification suites.
inline constexpr double kZeroGapTol = 1e-12;

/// Gap of the family's rule at tau, exact via CDF differences:
/// positive: F0(tau) - F1(tau); negative: F1(tau) - F0(tau).
inline double gap_of_threshold(const SignalModel& s, double tau,
                               ThresholdFamily family) {
  double d = s.f0.cdf(tau) - s.f1.cdf(tau);
  return family == ThresholdFamily::positive ? d : -d;
}

/// Largest gap any classifier can induce; attained only by the positive
/// rule at the crossing point (and its negative mirror at -max).
inline double max_threshold_gap(const SignalModel& s) {
  return gap_of_threshold(s, s.tau_c, ThresholdFamily::positive);
}

inline Classifier threshold_rule(ThresholdFamily family, double tau) {
  if (family == ThresholdFamily::positive)
    return Classifier{PositiveThreshold{tau}};
  return Classifier{NegativeThreshold{tau}};
}

// =========================================================================
// Prevalence matching
// =========================================================================

struct PrevalenceMatch {
  double target_gap = 0.0;
  double tau_l = 0.0;  // matched threshold left of the crossing point
  double tau_h = 0.0;  // matched threshold right of it
  bool degenerate = false;  // target at the extremal gap: tau_l == tau_h

  bool operator==(const PrevalenceMatch&) const = default;
};

/// The two thresholds (in the family matching the sign of target_gap) whose
/// rules reproduce the target gap, straddling the crossing point.
inline PrevalenceMatch match_prevalence(const SignalModel& s,
                                        double target_gap,
                                        const NumericsConfig& cfg = {}) {
  if (target_gap == 0.0)
    throw Error(Errc::zero_gap,
                "match_prevalence: target gap of zero has no matched "
                "threshold pair");
  const double d_max = max_threshold_gap(s);
  const double mag = std::abs(target_gap);
  if (mag > d_max + 1e-12)
    throw Error(Errc::infeasible_gap,
                "match_prevalence: |target gap| " + std::to_string(mag) +
                    " exceeds the extremal gap " + std::to_string(d_max));
  if (mag >= d_max - 1e-12)
    return {target_gap, s.tau_c, s.tau_c, true};

  const ThresholdFamily family = target_gap > 0.0 ? ThresholdFamily::positive
                                                  : ThresholdFamily::negative;
  // Widen the bracket for tiny targets: the tail gap is bounded by the tail
  // mass, so quantiles at mag / 4 guarantee a sign change.
  const double q = std::min(1e-6, mag / 4.0);
  const double lo = std::min(s.f0.quantile(q), s.f1.quantile(q));
  const double hi = std::max(s.f0.quantile(1.0 - q), s.f1.quantile(1.0 - q));
  auto fn = [&](double tau) {
    return gap_of_threshold(s, tau, family) - target_gap;
  };
  const double tau_l = find_root(fn, lo, s.tau_c, cfg);
  const double tau_h = find_root(fn, s.tau_c, hi, cfg);
  return {target_gap, tau_l, tau_h, false};
}

// =========================================================================
// Family optimization
// =========================================================================

struct FamilyCurvePoint {
  double tau = 0.0;
  double gap = 0.0;
  double prevalence = 0.0;
  double value = 0.0;

  bool operator==(const FamilyCurvePoint&) const = default;
};

struct FamilyResult {
  double tau = 0.0;
  double value = 0.0;
  int n_optima = 1;
  std::vector<FamilyCurvePoint> curve;
};

/// Maximizes the objective over one threshold family on the signal span.
inline FamilyResult optimize_family(const Environment& env,
                                    const ObjectiveWeights& w,
                                    ThresholdFamily family,
                                    const NumericsConfig& cfg = {}) {
  cfg.validate();
  const Span span = signal_span(env.signal);
  auto objective_at = [&](double tau) {
    return objective_value(env, threshold_rule(family, tau), w);
  };
  const MaxResult best = maximize_1d(objective_at, span.lo, span.hi, cfg);

  FamilyResult result;
  result.tau = best.x;
  result.value = best.value;
  result.n_optima = best.n_optima;
  result.curve.reserve(static_cast<std::size_t>(cfg.opt_grid_n));
  for (int i = 0; i < cfg.opt_grid_n; ++i) {
    double tau = span.lo + (span.hi - span.lo) * static_cast<double>(i) /
                               (cfg.opt_grid_n - 1);
    double gap = gap_of_threshold(env.signal, tau, family);
    result.curve.push_back({tau, gap, env.cost.cdf(env.r * gap),
                            objective_at(tau)});
  }
  return result;
}

// =========================================================================
// Full solve
// =========================================================================

enum class WinnerKind { positive, negative, constant };

struct BestThreshold {
  double tau = 0.0;
  double value = 0.0;
  bool operator==(const BestThreshold&) const = default;
};

struct BestConstant {
  double p = 0.0;  // 0 or 1
  double value = 0.0;
  bool operator==(const BestConstant&) const = default;
};

struct SolveCurvePoint {
  double tau = 0.0;
  double gap_pos = 0.0, gap_neg = 0.0;
  double prevalence_pos = 0.0, prevalence_neg = 0.0;
  double value_pos = 0.0, value_neg = 0.0;

  bool operator==(const SolveCurvePoint&) const = default;
};

struct SolveReport {
  BestThreshold best_positive;
  BestThreshold best_negative;
  BestConstant best_constant;
  WinnerKind winner = WinnerKind::positive;
  Classifier winner_rule = PositiveThreshold{0.0};
  double winner_value = 0.0;
  ObjectiveWeights objective;
  bool score_monotonicity_violated = false;
  bool guarantee_void = false;  // weights neither aligned nor misaligned
  std::vector<std::string> notes;
  std::vector<SolveCurvePoint> curve;

  bool operator==(const SolveReport&) const = default;
};

/// Optimizes both threshold families and the two constant rules and picks
/// the best. Value ties within 1e-10 resolve in favor of score-monotone
/// rules: positive threshold first, then constant, then negative threshold.
inline SolveReport solve_optimal(const Environment& env,
                                 const ObjectiveWeights& w,
                                 const NumericsConfig& cfg = {}) {
  const FamilyResult pos = optimize_family(env, w, ThresholdFamily::positive,
                                           cfg);
  const FamilyResult neg = optimize_family(env, w, ThresholdFamily::negative,
                                           cfg);
  const double v1 = objective_value(env, Constant{1.0}, w);
  const double v0 = objective_value(env, Constant{0.0}, w);

  SolveReport rep;
  rep.best_positive = {pos.tau, pos.value};
  rep.best_negative = {neg.tau, neg.value};
  rep.best_constant = v1 >= v0 ? BestConstant{1.0, v1} : BestConstant{0.0, v0};
  rep.objective = w;

  const double top = std::max({pos.value, neg.value, rep.best_constant.value});
  constexpr double kTie = 1e-10;
  if (pos.value >= top - kTie) {
    rep.winner = WinnerKind::positive;
    rep.winner_rule = PositiveThreshold{pos.tau};
    rep.winner_value = pos.value;
  } else if (rep.best_constant.value >= top - kTie) {
    rep.winner = WinnerKind::constant;
    rep.winner_rule = Constant{rep.best_constant.p};
    rep.winner_value = rep.best_constant.value;
  } else {
    rep.winner = WinnerKind::negative;
    rep.winner_rule = NegativeThreshold{neg.tau};
    rep.winner_value = neg.value;
  }
  rep.score_monotonicity_violated = rep.winner == WinnerKind::negative;

  if (w.alignment() == Alignment::neither) {
    rep.guarantee_void = true;
    rep.notes.push_back(
        "objective weights are neither accuracy-aligned nor "
        "accuracy-misaligned; threshold optimality is not guaranteed");
  }
  if (pos.n_optima > 1)
    rep.notes.push_back("positive family has multiple near-optimal "
                        "thresholds; smallest reported");
  if (neg.n_optima > 1)
    rep.notes.push_back("negative family has multiple near-optimal "
                        "thresholds; smallest reported");

  rep.curve.reserve(pos.curve.size());
  for (std::size_t i = 0; i < pos.curve.size(); ++i) {
    const auto& p = pos.curve[i];
    const auto& n = neg.curve[i];
    rep.curve.push_back({p.tau, p.gap, n.gap, p.prevalence, n.prevalence,
                         p.value, n.value});
  }
  return rep;
}

// =========================================================================
// Condition report: which matched threshold certifies dominance
// =========================================================================

struct ConditionReport {
  double gap = 0.0;
  double prevalence = 0.0;
  double pivot = 0.0;  // (B1 - B0) / (A1 - A0 + B1 - B0)
  Alignment alignment = Alignment::aligned;
  RemainderSide side = RemainderSide::plus;  // plus when gap > 0
  double tau_l = 0.0, tau_h = 0.0;
  double r1_tau_l = 0.0, r0_tau_l = 0.0;
  double r1_tau_h = 0.0, r0_tau_h = 0.0;
  // Payoff of the matched rule minus the classifier's payoff,
  // -H (A1 - A0) R1(tau) + (1 - H)(B1 - B0) R0(tau); >= 0 certifies.
  double payoff_gain_tau_l = 0.0, payoff_gain_tau_h = 0.0;
  bool tau_l_branch_holds = false;
  bool tau_h_branch_holds = false;

  bool operator==(const ConditionReport&) const = default;
};

/// Evaluates the matched-threshold certificates for a classifier with a
/// nonzero gap. Both branches can hold simultaneously when the prevalence
/// sits exactly at the pivot.
inline ConditionReport check_conditions(const Environment& env,
                                        const Classifier& c,
                                        const ObjectiveWeights& w =
                                            accuracy_weights(),
                                        const NumericsConfig& cfg = {}) {
  const Evaluation e = evaluate(env, c);
  if (std::abs(e.gap) <= kZeroGapTol)
    throw Error(Errc::zero_gap,
                "check_conditions: gap is zero; compare against the constant "
                "rules instead");
  const double dA = w.A1 - w.A0;
  const double dB = w.B1 - w.B0;
  if (dA + dB == 0.0)
    throw Error(Errc::degenerate_objective,
                "pivot undefined: objective reduces to a monotone function "
                "of prevalence, handled by the crossing-point rule");

  const PrevalenceMatch m = match_prevalence(env.signal, e.gap, cfg);
  const RemainderSide side =
      e.gap > 0.0 ? RemainderSide::plus : RemainderSide::minus;

  ConditionReport rep;
  rep.gap = e.gap;
  rep.prevalence = e.prevalence;
  rep.pivot = dB / (dA + dB);
  rep.alignment = w.alignment();
  rep.side = side;
  rep.tau_l = m.tau_l;
  rep.tau_h = m.tau_h;
  rep.r1_tau_l = remainder(c, env.signal, m.tau_l, side, 1);
  rep.r0_tau_l = remainder(c, env.signal, m.tau_l, side, 0);
  rep.r1_tau_h = remainder(c, env.signal, m.tau_h, side, 1);
  rep.r0_tau_h = remainder(c, env.signal, m.tau_h, side, 0);

  const double h = e.prevalence;
  auto gain = [&](double r1v, double r0v) {
    return -h * dA * r1v + (1.0 - h) * dB * r0v;
  };
  rep.payoff_gain_tau_l = gain(rep.r1_tau_l, rep.r0_tau_l);
  rep.payoff_gain_tau_h = gain(rep.r1_tau_h, rep.r0_tau_h);
  // tolerance at the noise floor set by the matched-threshold resolution
  rep.tau_l_branch_holds = rep.payoff_gain_tau_l >= -1e-9;
  rep.tau_h_branch_holds = rep.payoff_gain_tau_h >= -1e-9;
  return rep;
}

// =========================================================================
// Built-in worked example
// =========================================================================

/// The library's reference environment: gaussian cost N(0.75, 1), stakes
/// r1 = 5, r0 = 0, and unit-variance gaussian signals N(0, 1) vs N(1, 1).
/// Under accuracy weights the negative-threshold family wins here.
inline Environment worked_example_environment(const NumericsConfig& cfg = {}) {
  return make_environment(gaussian(0.75, 1.0), 5.0, 0.0,
                          make_signal_model(gaussian(0.0, 1.0),
                                            gaussian(1.0, 1.0), 2001, cfg));
}

}  // namespace perfclass
