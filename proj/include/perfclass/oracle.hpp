#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "perfclass/classifier.hpp"
#include "perfclass/error.hpp"
#include "perfclass/model.hpp"
#include "perfclass/solver.hpp"

namespace perfclass {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Independent, schedule-free generator for trial `index` of a suite.
inline std::mt19937_64 trial_rng(std::uint64_t seed, std::uint64_t index) {
  return std::mt19937_64(splitmix64(splitmix64(seed) ^ (index + 1)));
}

}  // namespace detail

// =========================================================================
// Random step classifiers
// =========================================================================

/// k sorted breakpoints uniform on `span` and k + 1 uniform values in
/// [0, 1]; a test-scale stand-in for an arbitrary integrable classifier.
inline Classifier random_step_classifier(std::mt19937_64& gen, int k,
                                         Span span) {
  if (k < 1)
    throw Error(Errc::invalid_parameter, "random_step_classifier: k >= 1");
  if (!(span.lo <= span.hi))
    throw Error(Errc::invalid_parameter, "random_step_classifier: empty span");
  Step s;
  if (span.lo == span.hi) {
    if (k != 1)
      throw Error(Errc::invalid_parameter,
                  "random_step_classifier: degenerate span supports k = 1 only");
    s.breaks = {span.lo};
  } else {
    for (int attempt = 0; attempt < 64; ++attempt) {
      s.breaks.clear();
      for (int i = 0; i < k; ++i)
        s.breaks.push_back(span.lo + uniform01(gen) * (span.hi - span.lo));
      std::sort(s.breaks.begin(), s.breaks.end());
      if (std::adjacent_find(s.breaks.begin(), s.breaks.end()) ==
          s.breaks.end())
        break;
    }
  }
  for (int i = 0; i <= k; ++i) s.values.push_back(uniform01(gen));
  return Classifier{s};
}

// =========================================================================
// Dominance verification
// =========================================================================

struct DominanceCheck {
  bool pass = false;
  bool zero_gap_case = false;  // compared against the constant rules
  double gap = 0.0;
  double objective_c = 0.0;
  double tau_l = 0.0, tau_h = 0.0;          // valid when !zero_gap_case
  double value_tau_l = 0.0, value_tau_h = 0.0;
  double value_constant = 0.0;              // valid when zero_gap_case
  double best_comparator = 0.0;
  double slack = 0.0;  // objective_c - best_comparator; > tol means failure

  bool operator==(const DominanceCheck&) const = default;
};

/// Checks that some matched threshold rule (or, at zero gap, a constant
/// rule) achieves at least the classifier's payoff, within tol.
inline DominanceCheck verify_dominance(const Environment& env,
                                       const Classifier& c,
                                       const ObjectiveWeights& w,
                                       double tol = 1e-8,
                                       const NumericsConfig& cfg = {}) {
  DominanceCheck out;
  const Evaluation e = evaluate(env, c);
  out.gap = e.gap;
  out.objective_c = objective_value(env, c, w);
  if (std::abs(e.gap) <= kZeroGapTol) {
    out.zero_gap_case = true;
    out.value_constant = std::max(objective_value(env, Constant{1.0}, w),
                                  objective_value(env, Constant{0.0}, w));
    out.best_comparator = out.value_constant;
  } else {
    const PrevalenceMatch m = match_prevalence(env.signal, e.gap, cfg);
    const ThresholdFamily family = e.gap > 0.0 ? ThresholdFamily::positive
                                               : ThresholdFamily::negative;
    out.tau_l = m.tau_l;
    out.tau_h = m.tau_h;
    out.value_tau_l = objective_value(env, threshold_rule(family, m.tau_l), w);
    out.value_tau_h = objective_value(env, threshold_rule(family, m.tau_h), w);
    out.best_comparator = std::max(out.value_tau_l, out.value_tau_h);
  }
  out.slack = out.objective_c - out.best_comparator;
  out.pass = out.slack <= tol;
  return out;
}

// =========================================================================
// Remainder-sign verification
// =========================================================================

struct RemainderSignCheck {
  bool skipped = false;  // gap within the zero tolerance
  bool pass = false;
  double gap = 0.0;
  RemainderSide side = RemainderSide::plus;
  double tau_l = 0.0, tau_h = 0.0;
  double r1_tau_l = 0.0, r0_tau_l = 0.0;
  double r1_tau_h = 0.0, r0_tau_h = 0.0;
  bool signs_ok = false;
  double mismatch_tau_l = 0.0, mismatch_tau_h = 0.0;  // |R1 - R0| at each
  bool equality_ok = false;
  double residual_tau_l = 0.0, residual_tau_h = 0.0;  // |gap(tau) - gap|
  bool residual_ok = false;
  bool ordering_ok = false;  // tau_l <= tau_c <= tau_h

  bool operator==(const RemainderSignCheck&) const = default;
};

inline constexpr double kMatchResidualTol = 1e-9;

/// Verifies the remainder-sign claims at the matched thresholds: for a
/// positive gap, R1+(tau_l) <= tol and R0+(tau_h) >= -tol; for a negative
/// gap, R1-(tau_l) >= -tol and R0-(tau_h) <= tol. Also checks the matched
/// equality |R1 - R0| <= tol at both thresholds and the gap residuals.
inline RemainderSignCheck verify_remainder_signs(const Environment& env,
                                     const Classifier& c, double tol = 1e-8,
                                     const NumericsConfig& cfg = {}) {
  RemainderSignCheck out;
  const Evaluation e = evaluate(env, c);
  out.gap = e.gap;
  if (std::abs(e.gap) <= kZeroGapTol) {
    out.skipped = true;
    out.pass = true;
    return out;
  }
  const PrevalenceMatch m = match_prevalence(env.signal, e.gap, cfg);
  const ThresholdFamily family = e.gap > 0.0 ? ThresholdFamily::positive
                                             : ThresholdFamily::negative;
  out.side = e.gap > 0.0 ? RemainderSide::plus : RemainderSide::minus;
  out.tau_l = m.tau_l;
  out.tau_h = m.tau_h;
  out.r1_tau_l = remainder(c, env.signal, m.tau_l, out.side, 1);
  out.r0_tau_l = remainder(c, env.signal, m.tau_l, out.side, 0);
  out.r1_tau_h = remainder(c, env.signal, m.tau_h, out.side, 1);
  out.r0_tau_h = remainder(c, env.signal, m.tau_h, out.side, 0);

  out.signs_ok = e.gap > 0.0
                     ? (out.r1_tau_l <= tol && out.r0_tau_h >= -tol)
                     : (out.r1_tau_l >= -tol && out.r0_tau_h <= tol);
  out.mismatch_tau_l = std::abs(out.r1_tau_l - out.r0_tau_l);
  out.mismatch_tau_h = std::abs(out.r1_tau_h - out.r0_tau_h);
  out.equality_ok = out.mismatch_tau_l <= tol && out.mismatch_tau_h <= tol;
  out.residual_tau_l =
      std::abs(gap_of_threshold(env.signal, m.tau_l, family) - e.gap);
  out.residual_tau_h =
      std::abs(gap_of_threshold(env.signal, m.tau_h, family) - e.gap);
  out.residual_ok = out.residual_tau_l <= kMatchResidualTol &&
                    out.residual_tau_h <= kMatchResidualTol;
  out.ordering_ok = m.tau_l <= env.signal.tau_c && env.signal.tau_c <= m.tau_h;
  out.pass = out.signs_ok && out.equality_ok && out.residual_ok &&
             out.ordering_ok;
  return out;
}

// =========================================================================
// Seeded population simulation
// =========================================================================

struct EmpiricalEvaluation {
  long long n = 0;
  std::uint64_t seed = 0;
  double prevalence = 0.0;
  double tp = 0.0, fn_ = 0.0, fp = 0.0, tn = 0.0;
  double accuracy = 0.0;
  double se_prevalence = 0.0;
  double se_accuracy = 0.0;

  bool operator==(const EmpiricalEvaluation&) const = default;
};

/// n independent agents: draw a cost, best-respond to the committed
/// classifier, emit a signal from the behavior's density, then classify by
/// a coin flip with probability delta(x). Deterministic per seed.
inline EmpiricalEvaluation simulate_population(const Environment& env,
                                               const Classifier& c,
                                               long long n,
                                               std::uint64_t seed) {
  if (n < 1)
    throw Error(Errc::invalid_parameter, "simulate_population: n must be >= 1");
  validate_classifier(c);
  const Evaluation e = evaluate(env, c);
  const double gain = env.r * e.gap;  // same for every agent
  std::mt19937_64 gen(detail::splitmix64(seed));

  long long n1 = 0, tp = 0, fn_ = 0, fp = 0, tn = 0;
  for (long long i = 0; i < n; ++i) {
    const double gamma = env.cost.sample(gen);
    const bool comply = gain >= gamma;
    const double x = (comply ? env.signal.f1 : env.signal.f0).sample(gen);
    const bool d = uniform01(gen) < classify_prob(c, x);
    n1 += comply;
    if (comply)
      (d ? tp : fn_) += 1;
    else
      (d ? fp : tn) += 1;
  }

  EmpiricalEvaluation out;
  out.n = n;
  out.seed = seed;
  const double dn = static_cast<double>(n);
  out.prevalence = static_cast<double>(n1) / dn;
  out.tp = static_cast<double>(tp) / dn;
  out.fn_ = static_cast<double>(fn_) / dn;
  out.fp = static_cast<double>(fp) / dn;
  out.tn = static_cast<double>(tn) / dn;
  out.accuracy = static_cast<double>(tp + tn) / dn;
  auto se = [dn](double p) { return std::sqrt(p * (1.0 - p) / dn); };
  out.se_prevalence = se(out.prevalence);
  out.se_accuracy = se(out.accuracy);
  return out;
}

// =========================================================================
// Randomized suite
// =========================================================================

enum class WeightScheme {
  accuracy_only,  // every trial uses accuracy weights
  general,        // alternate randomly drawn aligned / misaligned weights
  mixed           // cycle accuracy, aligned, misaligned
};

struct Range {
  double lo = 0.0;
  double hi = 0.0;
  bool operator==(const Range&) const = default;
};

struct TrialConfig {
  int n_trials = 500;
  int max_steps = 8;  // step-classifier pieces drawn uniformly in [1, max]
  Range cost_mu{-2.0, 2.0};
  Range cost_sigma{0.5, 2.0};
  Range reward{0.5, 10.0};
  Range signal_shift{0.5, 2.0};
  Range signal_sigma{0.5, 2.0};
  std::uint64_t seed = 42;
  double tolerance = 1e-8;
  WeightScheme scheme = WeightScheme::mixed;

  void validate() const {
    if (n_trials < 0)
      throw Error(Errc::invalid_parameter, "n_trials must be >= 0");
    if (max_steps < 1)
      throw Error(Errc::invalid_parameter, "max_steps must be >= 1");
    if (!(tolerance > 0.0))
      throw Error(Errc::invalid_parameter, "tolerance must be positive");
    for (const Range& r :
         {cost_mu, cost_sigma, reward, signal_shift, signal_sigma})
      if (!(r.lo <= r.hi))
        throw Error(Errc::invalid_parameter, "sampler range is empty");
    if (!(cost_sigma.lo > 0.0) || !(signal_sigma.lo > 0.0) ||
        !(reward.lo > 0.0) || !(signal_shift.lo > 0.0))
      throw Error(Errc::invalid_parameter,
                  "scale, reward and shift ranges must be positive");
  }

  bool operator==(const TrialConfig&) const = default;
};

struct TrialFailure {
  int trial = 0;
  std::string reason;
  Environment environment;
  Classifier classifier = Constant{0.0};
  ObjectiveWeights weights;
  double gap = 0.0;
  double tau_l = 0.0, tau_h = 0.0;
  double r1_tau_l = 0.0, r0_tau_l = 0.0, r1_tau_h = 0.0, r0_tau_h = 0.0;
  double objective_c = 0.0;
  double best_comparator = 0.0;
  double slack = 0.0;

  bool operator==(const TrialFailure&) const = default;
};

struct TrialReport {
  std::uint64_t seed = 0;
  WeightScheme scheme = WeightScheme::mixed;
  double tolerance = 0.0;
  int trials_run = 0;
  int failures = 0;
  int dominance_failures = 0;
  int sign_failures = 0;
  int equality_failures = 0;
  int residual_failures = 0;
  int sign_checked = 0;
  int sign_skipped = 0;
  double max_dominance_slack = 0.0;  // max of objective_c - best_comparator
  double max_remainder_mismatch = 0.0;
  double max_match_residual = 0.0;
  std::vector<TrialFailure> failure_details;

  bool operator==(const TrialReport&) const = default;
};

namespace detail {

inline double draw(std::mt19937_64& gen, Range r) {
  return r.lo + uniform01(gen) * (r.hi - r.lo);
}

inline ObjectiveWeights random_weights(std::mt19937_64& gen, bool aligned) {
  double u0 = uniform01(gen), u1 = uniform01(gen);
  double u2 = uniform01(gen), u3 = uniform01(gen);
  ObjectiveWeights w;
  w.A1 = aligned ? std::max(u0, u1) : std::min(u0, u1);
  w.A0 = aligned ? std::min(u0, u1) : std::max(u0, u1);
  w.B1 = aligned ? std::max(u2, u3) : std::min(u2, u3);
  w.B0 = aligned ? std::min(u2, u3) : std::max(u2, u3);
  return w;
}

}  // namespace detail

/// Batch driver: n_trials random environments and step classifiers, each run
/// through verify_dominance and verify_remainder_signs. Deterministic per seed;
/// trials derive independent generators so results are order-free.
inline TrialReport run_suite(const TrialConfig& cfg) {
  cfg.validate();
  TrialReport rep;
  rep.seed = cfg.seed;
  rep.scheme = cfg.scheme;
  rep.tolerance = cfg.tolerance;
  rep.trials_run = cfg.n_trials;

  bool any_slack = false, any_mismatch = false, any_residual = false;
  for (int t = 0; t < cfg.n_trials; ++t) {
    std::mt19937_64 gen = detail::trial_rng(cfg.seed, static_cast<std::uint64_t>(t));

    const ContinuousDist cost = gaussian(detail::draw(gen, cfg.cost_mu),
                                         detail::draw(gen, cfg.cost_sigma));
    const double r = detail::draw(gen, cfg.reward);
    const double shift = detail::draw(gen, cfg.signal_shift);
    const double sigma = detail::draw(gen, cfg.signal_sigma);
    const Environment env = make_environment(
        cost, r, 0.0,
        make_signal_model(gaussian(0.0, sigma), gaussian(shift, sigma)));

    const int k =
        1 + static_cast<int>(uniform01(gen) * static_cast<double>(cfg.max_steps));
    const Classifier c = random_step_classifier(
        gen, std::min(k, cfg.max_steps), signal_span(env.signal));

    ObjectiveWeights w;
    switch (cfg.scheme) {
      case WeightScheme::accuracy_only:
        w = accuracy_weights();
        break;
      case WeightScheme::general:
        w = detail::random_weights(gen, t % 2 == 0);
        break;
      case WeightScheme::mixed:
        if (t % 3 == 0)
          w = accuracy_weights();
        else
          w = detail::random_weights(gen, t % 3 == 1);
        break;
    }

    const DominanceCheck dom = verify_dominance(env, c, w, cfg.tolerance);
    const RemainderSignCheck signs = verify_remainder_signs(env, c, cfg.tolerance);

    if (!any_slack || dom.slack > rep.max_dominance_slack)
      rep.max_dominance_slack = dom.slack;
    any_slack = true;
    if (signs.skipped) {
      ++rep.sign_skipped;
    } else {
      ++rep.sign_checked;
      double mm = std::max(signs.mismatch_tau_l, signs.mismatch_tau_h);
      double res = std::max(signs.residual_tau_l, signs.residual_tau_h);
      if (!any_mismatch || mm > rep.max_remainder_mismatch)
        rep.max_remainder_mismatch = mm;
      any_mismatch = true;
      if (!any_residual || res > rep.max_match_residual)
        rep.max_match_residual = res;
      any_residual = true;
    }

    std::vector<std::string> reasons;
    if (!dom.pass) {
      reasons.push_back("dominance");
      ++rep.dominance_failures;
    }
    if (!signs.skipped && !signs.signs_ok) {
      reasons.push_back("remainder signs");
      ++rep.sign_failures;
    }
    if (!signs.skipped && !signs.equality_ok) {
      reasons.push_back("matched-remainder equality");
      ++rep.equality_failures;
    }
    if (!signs.skipped && (!signs.residual_ok || !signs.ordering_ok)) {
      reasons.push_back("prevalence-match residual/ordering");
      ++rep.residual_failures;
    }
    if (!reasons.empty()) {
      ++rep.failures;
      TrialFailure f;
      f.trial = t;
      for (const auto& why : reasons) {
        if (!f.reason.empty()) f.reason += "; ";
        f.reason += why;
      }
      f.environment = env;
      f.classifier = c;
      f.weights = w;
      f.gap = dom.gap;
      f.tau_l = signs.tau_l;
      f.tau_h = signs.tau_h;
      f.r1_tau_l = signs.r1_tau_l;
      f.r0_tau_l = signs.r0_tau_l;
      f.r1_tau_h = signs.r1_tau_h;
      f.r0_tau_h = signs.r0_tau_h;
      f.objective_c = dom.objective_c;
      f.best_comparator = dom.best_comparator;
      f.slack = dom.slack;
      rep.failure_details.push_back(std::move(f));
    }
  }
  return rep;
}

}  // namespace perfclass
