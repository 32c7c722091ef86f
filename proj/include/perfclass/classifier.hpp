#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "perfclass/error.hpp"
#include "perfclass/model.hpp"

namespace perfclass {

// =========================================================================
// Classifier variants
// =========================================================================

// d = 1 exactly when x > tau.
struct PositiveThreshold {
  double tau = 0.0;
  bool operator==(const PositiveThreshold&) const = default;
};

// d = 1 exactly when x < tau.
struct NegativeThreshold {
  double tau = 0.0;
  bool operator==(const NegativeThreshold&) const = default;
};

// Piecewise-constant acceptance probability: values[j] on
// (breaks[j-1], breaks[j]], with breaks strictly ascending. A boundary point
// takes the value of the interval to its right.
struct Step {
  std::vector<double> breaks;
  std::vector<double> values;  // breaks.size() + 1 entries, each in [0, 1]
  bool operator==(const Step&) const = default;
};

// d = 1 with fixed probability p, regardless of the signal.
struct Constant {
  double p = 0.0;
  bool operator==(const Constant&) const = default;
};

using Classifier = std::variant<PositiveThreshold, NegativeThreshold, Step,
                                Constant>;

inline void validate_classifier(const Classifier& c) {
  if (const auto* t = std::get_if<PositiveThreshold>(&c)) {
    if (!std::isfinite(t->tau))
      throw Error(Errc::invalid_parameter, "threshold tau must be finite");
  } else if (const auto* t = std::get_if<NegativeThreshold>(&c)) {
    if (!std::isfinite(t->tau))
      throw Error(Errc::invalid_parameter, "threshold tau must be finite");
  } else if (const auto* s = std::get_if<Step>(&c)) {
    if (s->breaks.empty())
      throw Error(Errc::invalid_parameter, "step rule needs at least one break");
    if (s->values.size() != s->breaks.size() + 1)
      throw Error(Errc::invalid_parameter,
                  "step rule needs breaks.size() + 1 values");
    for (std::size_t i = 0; i + 1 < s->breaks.size(); ++i)
      if (!(s->breaks[i] < s->breaks[i + 1]))
        throw Error(Errc::invalid_parameter,
                    "step breaks must be strictly ascending");
    for (double b : s->breaks)
      if (!std::isfinite(b))
        throw Error(Errc::invalid_parameter, "step breaks must be finite");
    for (double v : s->values)
      if (!(v >= 0.0 && v <= 1.0))
        throw Error(Errc::invalid_parameter, "step values must lie in [0, 1]");
  } else if (const auto* k = std::get_if<Constant>(&c)) {
    if (!(k->p >= 0.0 && k->p <= 1.0))
      throw Error(Errc::invalid_parameter, "constant p must lie in [0, 1]");
  }
}

/// Pointwise acceptance probability delta(x).
inline double classify_prob(const Classifier& c, double x) {
  return std::visit(
      [x](const auto& rule) -> double {
        using T = std::decay_t<decltype(rule)>;
        if constexpr (std::is_same_v<T, PositiveThreshold>) {
          return x > rule.tau ? 1.0 : 0.0;
        } else if constexpr (std::is_same_v<T, NegativeThreshold>) {
          return x < rule.tau ? 1.0 : 0.0;
        } else if constexpr (std::is_same_v<T, Step>) {
          auto it = std::upper_bound(rule.breaks.begin(), rule.breaks.end(), x);
          return rule.values[static_cast<std::size_t>(
              it - rule.breaks.begin())];
        } else {
          return rule.p;
        }
      },
      c);
}

// =========================================================================
// Per-classifier quantities
// =========================================================================

struct AcceptanceRates {
  double delta0 = 0.0;  // acceptance probability of a noncomplier
  double delta1 = 0.0;  // acceptance probability of a complier
};

/// Acceptance probabilities under f0 and f1, computed exactly from CDF
/// differences (no quadrature).
inline AcceptanceRates acceptance_rates(const Classifier& c,
                                        const SignalModel& s) {
  validate_classifier(c);
  auto rate = [&](const ContinuousDist& f) -> double {
    return std::visit(
        [&](const auto& rule) -> double {
          using T = std::decay_t<decltype(rule)>;
          if constexpr (std::is_same_v<T, PositiveThreshold>) {
            return 1.0 - f.cdf(rule.tau);
          } else if constexpr (std::is_same_v<T, NegativeThreshold>) {
            return f.cdf(rule.tau);
          } else if constexpr (std::is_same_v<T, Step>) {
            double prev = f.cdf(rule.breaks.front());
            double acc = rule.values.front() * prev;
            for (std::size_t j = 1; j < rule.breaks.size(); ++j) {
              double cur = f.cdf(rule.breaks[j]);
              acc += rule.values[j] * (cur - prev);
              prev = cur;
            }
            acc += rule.values.back() * (1.0 - prev);
            return std::clamp(acc, 0.0, 1.0);
          } else {
            return rule.p;
          }
        },
        c);
  };
  return {rate(s.f0), rate(s.f1)};
}

struct Evaluation {
  double delta0 = 0.0;
  double delta1 = 0.0;
  double gap = 0.0;         // delta1 - delta0, in [-1, 1]
  double prevalence = 0.0;  // H(r * gap)
  double tp = 0.0, fn_ = 0.0, fp = 0.0, tn = 0.0;  // confusion-cell masses
  double accuracy = 0.0;    // tp + tn

  bool operator==(const Evaluation&) const = default;
};

/// Full analytic evaluation of a classifier in an environment: the
/// performativity gap, the induced prevalence, and the confusion masses.
inline Evaluation evaluate(const Environment& env, const Classifier& c) {
  const auto [d0, d1] = acceptance_rates(c, env.signal);
  Evaluation e;
  e.delta0 = d0;
  e.delta1 = d1;
  e.gap = d1 - d0;
  e.prevalence = env.cost.cdf(env.r * e.gap);
  e.tp = e.prevalence * d1;
  e.fn_ = e.prevalence * (1.0 - d1);
  e.fp = (1.0 - e.prevalence) * d0;
  e.tn = (1.0 - e.prevalence) * (1.0 - d0);
  e.accuracy = e.tp + e.tn;
  return e;
}

// =========================================================================
// Confusion-cell objectives
// =========================================================================

enum class Alignment { aligned, misaligned, neither };

/// Cell weights: A1/A0 apply to compliers classified 1/0, B1/B0 to
/// noncompliers classified 0/1. Accuracy is (A1, A0, B1, B0) = (1, 0, 1, 0).
struct ObjectiveWeights {
  double A1 = 1.0;  // true positive
  double A0 = 0.0;  // false negative
  double B1 = 1.0;  // true negative
  double B0 = 0.0;  // false positive

  Alignment alignment() const {
    if (A1 >= A0 && B1 >= B0) return Alignment::aligned;
    if (A1 <= A0 && B1 <= B0) return Alignment::misaligned;
    return Alignment::neither;
  }

  bool operator==(const ObjectiveWeights&) const = default;
};

inline ObjectiveWeights accuracy_weights() { return {1.0, 0.0, 1.0, 0.0}; }

// Reduces the objective to the prevalence H(r * gap) itself.
inline ObjectiveWeights compliance_weights() { return {1.0, 1.0, 0.0, 0.0}; }

/// Prevalence-weighted cell objective,
///   H * (A1 * delta1 + A0 * (1 - delta1))
///     + (1 - H) * (B1 * (1 - delta0) + B0 * delta0).
/// Specializes exactly to Evaluation.accuracy under accuracy weights.
inline double objective_value(const Environment& env, const Classifier& c,
                              const ObjectiveWeights& w) {
  const Evaluation e = evaluate(env, c);
  return e.prevalence * (w.A1 * e.delta1 + w.A0 * (1.0 - e.delta1)) +
         (1.0 - e.prevalence) * (w.B1 * (1.0 - e.delta0) + w.B0 * e.delta0);
}

/// Individual best response: comply exactly when the expected classification
/// gain r * gap covers the private cost.
inline int best_response(double gamma, const Environment& env,
                         const Classifier& c) {
  return env.r * evaluate(env, c).gap >= gamma ? 1 : 0;
}

// =========================================================================
// Remainder terms
// =========================================================================

enum class RemainderSide { plus, minus };

/// Acceptance-probability difference, for behavior beta, between the
/// classifier and the threshold rule at tau:
///   plus:  delta_beta - (1 - F_beta(tau))   (vs. the positive rule)
///   minus: delta_beta - F_beta(tau)         (vs. the negative rule)
inline double remainder(const Classifier& c, const SignalModel& s, double tau,
                        RemainderSide side, int behavior) {
  if (behavior != 0 && behavior != 1)
    throw Error(Errc::invalid_parameter, "behavior must be 0 or 1");
  const auto [d0, d1] = acceptance_rates(c, s);
  const double d = behavior == 1 ? d1 : d0;
  const ContinuousDist& f = behavior == 1 ? s.f1 : s.f0;
  return side == RemainderSide::plus ? d - (1.0 - f.cdf(tau)) : d - f.cdf(tau);
}

}  // namespace perfclass
