#pragma once

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "perfclass/classifier.hpp"
#include "perfclass/dist.hpp"
#include "perfclass/error.hpp"
#include "perfclass/model.hpp"
#include "perfclass/oracle.hpp"
#include "perfclass/solver.hpp"

namespace perfclass {

using json = nlohmann::json;

// =========================================================================
// Number formatting
// =========================================================================

// Reports print floating-point values at 12 significant digits; rounding the
// value (rather than the text) keeps serialize -> parse -> serialize
// byte-stable.
inline double round12(double x) {
  if (!std::isfinite(x) || x == 0.0) return x;
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.11e", x);
  return std::strtod(buf, nullptr);
}

inline json jnum(double x) { return json(round12(x)); }

namespace detail {

inline double req_num(const json& j, const std::string& key) {
  if (!j.contains(key))
    throw Error(Errc::config, "missing numeric field '" + key + "'");
  const json& v = j.at(key);
  if (!v.is_number())
    throw Error(Errc::config, "field '" + key + "' must be a number");
  double x = v.get<double>();
  if (!std::isfinite(x))
    throw Error(Errc::config, "field '" + key + "' must be finite");
  return x;
}

inline double opt_num(const json& j, const std::string& key, double fallback) {
  return j.contains(key) ? req_num(j, key) : fallback;
}

inline std::string req_str(const json& j, const std::string& key) {
  if (!j.contains(key) || !j.at(key).is_string())
    throw Error(Errc::config, "missing string field '" + key + "'");
  return j.at(key).get<std::string>();
}

}  // namespace detail

// =========================================================================
// Distributions / classifiers / weights
// =========================================================================

inline json dist_to_json(const ContinuousDist& d) {
  switch (d.kind) {
    case DistKind::gaussian:
      return {{"kind", "gaussian"}, {"mu", jnum(d.a)}, {"sigma", jnum(d.b)}};
    case DistKind::logistic:
      return {{"kind", "logistic"}, {"mu", jnum(d.a)}, {"sigma", jnum(d.b)}};
    case DistKind::uniform:
      return {{"kind", "uniform"}, {"a", jnum(d.a)}, {"b", jnum(d.b)}};
  }
  return json();
}

inline ContinuousDist dist_from_json(const json& j) {
  const std::string kind = detail::req_str(j, "kind");
  if (kind == "gaussian")
    return make_dist(DistKind::gaussian, detail::req_num(j, "mu"),
                     detail::req_num(j, "sigma"));
  if (kind == "logistic")
    return make_dist(DistKind::logistic, detail::req_num(j, "mu"),
                     detail::req_num(j, "sigma"));
  if (kind == "uniform")
    return make_dist(DistKind::uniform, detail::req_num(j, "a"),
                     detail::req_num(j, "b"));
  throw Error(Errc::config, "unknown distribution kind '" + kind + "'");
}

inline json classifier_to_json(const Classifier& c) {
  if (const auto* t = std::get_if<PositiveThreshold>(&c))
    return {{"type", "positive"}, {"tau", jnum(t->tau)}};
  if (const auto* t = std::get_if<NegativeThreshold>(&c))
    return {{"type", "negative"}, {"tau", jnum(t->tau)}};
  if (const auto* s = std::get_if<Step>(&c)) {
    json breaks = json::array(), values = json::array();
    for (double b : s->breaks) breaks.push_back(jnum(b));
    for (double v : s->values) values.push_back(jnum(v));
    return {{"type", "step"}, {"breaks", breaks}, {"values", values}};
  }
  const auto& k = std::get<Constant>(c);
  return {{"type", "constant"}, {"p", jnum(k.p)}};
}

inline Classifier classifier_from_json(const json& j) {
  const std::string type = detail::req_str(j, "type");
  Classifier c;
  if (type == "positive") {
    c = PositiveThreshold{detail::req_num(j, "tau")};
  } else if (type == "negative") {
    c = NegativeThreshold{detail::req_num(j, "tau")};
  } else if (type == "step") {
    if (!j.contains("breaks") || !j.at("breaks").is_array() ||
        !j.contains("values") || !j.at("values").is_array())
      throw Error(Errc::config, "step classifier needs breaks[] and values[]");
    Step s;
    for (const auto& b : j.at("breaks")) {
      if (!b.is_number() || !std::isfinite(b.get<double>()))
        throw Error(Errc::config, "step breaks must be finite numbers");
      s.breaks.push_back(b.get<double>());
    }
    for (const auto& v : j.at("values")) {
      if (!v.is_number() || !std::isfinite(v.get<double>()))
        throw Error(Errc::config, "step values must be finite numbers");
      s.values.push_back(v.get<double>());
    }
    c = s;
  } else if (type == "constant") {
    c = Constant{detail::req_num(j, "p")};
  } else {
    throw Error(Errc::config, "unknown classifier type '" + type + "'");
  }
  try {
    validate_classifier(c);
  } catch (const Error& e) {
    throw Error(Errc::config, std::string("bad classifier spec: ") + e.what());
  }
  return c;
}

inline const char* alignment_name(Alignment a) {
  switch (a) {
    case Alignment::aligned: return "aligned";
    case Alignment::misaligned: return "misaligned";
    case Alignment::neither: return "neither";
  }
  return "neither";
}

inline json weights_to_json(const ObjectiveWeights& w) {
  return {{"A1", jnum(w.A1)}, {"A0", jnum(w.A0)}, {"B1", jnum(w.B1)},
          {"B0", jnum(w.B0)}, {"alignment", alignment_name(w.alignment())}};
}

inline ObjectiveWeights weights_from_json(const json& j) {
  return {detail::req_num(j, "A1"), detail::req_num(j, "A0"),
          detail::req_num(j, "B1"), detail::req_num(j, "B0")};
}

inline json numerics_to_json(const NumericsConfig& n) {
  return {{"quad_tol", jnum(n.quad_tol)},
          {"root_tol", jnum(n.root_tol)},
          {"opt_grid_n", n.opt_grid_n},
          {"tail_mass", jnum(n.tail_mass)}};
}

inline NumericsConfig numerics_from_json(const json& j) {
  NumericsConfig n;
  n.quad_tol = detail::opt_num(j, "quad_tol", n.quad_tol);
  n.root_tol = detail::opt_num(j, "root_tol", n.root_tol);
  if (j.contains("opt_grid_n")) {
    if (!j.at("opt_grid_n").is_number_integer())
      throw Error(Errc::config, "opt_grid_n must be an integer");
    n.opt_grid_n = j.at("opt_grid_n").get<int>();
  }
  n.tail_mass = detail::opt_num(j, "tail_mass", n.tail_mass);
  try {
    n.validate();
  } catch (const Error& e) {
    throw Error(Errc::config, std::string("bad numerics block: ") + e.what());
  }
  return n;
}

// =========================================================================
// Evaluation / condition reports
// =========================================================================

inline json evaluation_to_json(const Evaluation& e) {
  return {{"delta0", jnum(e.delta0)},     {"delta1", jnum(e.delta1)},
          {"gap", jnum(e.gap)},           {"prevalence", jnum(e.prevalence)},
          {"tp", jnum(e.tp)},             {"fn", jnum(e.fn_)},
          {"fp", jnum(e.fp)},             {"tn", jnum(e.tn)},
          {"accuracy", jnum(e.accuracy)}};
}

inline Evaluation evaluation_from_json(const json& j) {
  Evaluation e;
  e.delta0 = detail::req_num(j, "delta0");
  e.delta1 = detail::req_num(j, "delta1");
  e.gap = detail::req_num(j, "gap");
  e.prevalence = detail::req_num(j, "prevalence");
  e.tp = detail::req_num(j, "tp");
  e.fn_ = detail::req_num(j, "fn");
  e.fp = detail::req_num(j, "fp");
  e.tn = detail::req_num(j, "tn");
  e.accuracy = detail::req_num(j, "accuracy");
  return e;
}

inline json condition_report_to_json(const ConditionReport& c) {
  return {{"gap", jnum(c.gap)},
          {"prevalence", jnum(c.prevalence)},
          {"pivot", jnum(c.pivot)},
          {"alignment", alignment_name(c.alignment)},
          {"side", c.side == RemainderSide::plus ? "plus" : "minus"},
          {"tau_l", jnum(c.tau_l)},
          {"tau_h", jnum(c.tau_h)},
          {"r1_tau_l", jnum(c.r1_tau_l)},
          {"r0_tau_l", jnum(c.r0_tau_l)},
          {"r1_tau_h", jnum(c.r1_tau_h)},
          {"r0_tau_h", jnum(c.r0_tau_h)},
          {"payoff_gain_tau_l", jnum(c.payoff_gain_tau_l)},
          {"payoff_gain_tau_h", jnum(c.payoff_gain_tau_h)},
          {"tau_l_branch_holds", c.tau_l_branch_holds},
          {"tau_h_branch_holds", c.tau_h_branch_holds}};
}

inline ConditionReport condition_report_from_json(const json& j) {
  ConditionReport c;
  c.gap = detail::req_num(j, "gap");
  c.prevalence = detail::req_num(j, "prevalence");
  c.pivot = detail::req_num(j, "pivot");
  const std::string a = detail::req_str(j, "alignment");
  c.alignment = a == "aligned" ? Alignment::aligned
               : a == "misaligned" ? Alignment::misaligned
                                   : Alignment::neither;
  c.side = detail::req_str(j, "side") == "plus" ? RemainderSide::plus
                                                : RemainderSide::minus;
  c.tau_l = detail::req_num(j, "tau_l");
  c.tau_h = detail::req_num(j, "tau_h");
  c.r1_tau_l = detail::req_num(j, "r1_tau_l");
  c.r0_tau_l = detail::req_num(j, "r0_tau_l");
  c.r1_tau_h = detail::req_num(j, "r1_tau_h");
  c.r0_tau_h = detail::req_num(j, "r0_tau_h");
  c.payoff_gain_tau_l = detail::req_num(j, "payoff_gain_tau_l");
  c.payoff_gain_tau_h = detail::req_num(j, "payoff_gain_tau_h");
  c.tau_l_branch_holds = j.at("tau_l_branch_holds").get<bool>();
  c.tau_h_branch_holds = j.at("tau_h_branch_holds").get<bool>();
  return c;
}

// =========================================================================
// Solve report
// =========================================================================

inline const char* winner_name(WinnerKind w) {
  switch (w) {
    case WinnerKind::positive: return "positive";
    case WinnerKind::negative: return "negative";
    case WinnerKind::constant: return "constant";
  }
  return "positive";
}

inline json solve_report_to_json(const SolveReport& r) {
  json curve = json::array();
  for (const auto& p : r.curve)
    curve.push_back({jnum(p.tau), jnum(p.gap_pos), jnum(p.gap_neg),
                     jnum(p.prevalence_pos), jnum(p.prevalence_neg),
                     jnum(p.value_pos), jnum(p.value_neg)});
  json notes = json::array();
  for (const auto& n : r.notes) notes.push_back(n);
  return {{"best_positive",
           {{"tau", jnum(r.best_positive.tau)},
            {"value", jnum(r.best_positive.value)}}},
          {"best_negative",
           {{"tau", jnum(r.best_negative.tau)},
            {"value", jnum(r.best_negative.value)}}},
          {"best_constant",
           {{"p", jnum(r.best_constant.p)},
            {"value", jnum(r.best_constant.value)}}},
          {"winner", winner_name(r.winner)},
          {"winner_rule", classifier_to_json(r.winner_rule)},
          {"winner_value", jnum(r.winner_value)},
          {"objective", weights_to_json(r.objective)},
          {"score_monotonicity_violated", r.score_monotonicity_violated},
          {"guarantee_void", r.guarantee_void},
          {"notes", notes},
          {"curve_columns",
           {"tau", "gap_pos", "gap_neg", "prevalence_pos", "prevalence_neg",
            "value_pos", "value_neg"}},
          {"curve", curve}};
}

inline SolveReport solve_report_from_json(const json& j) {
  SolveReport r;
  r.best_positive = {detail::req_num(j.at("best_positive"), "tau"),
                     detail::req_num(j.at("best_positive"), "value")};
  r.best_negative = {detail::req_num(j.at("best_negative"), "tau"),
                     detail::req_num(j.at("best_negative"), "value")};
  r.best_constant = {detail::req_num(j.at("best_constant"), "p"),
                     detail::req_num(j.at("best_constant"), "value")};
  const std::string w = detail::req_str(j, "winner");
  r.winner = w == "negative" ? WinnerKind::negative
            : w == "constant" ? WinnerKind::constant
                              : WinnerKind::positive;
  r.winner_rule = classifier_from_json(j.at("winner_rule"));
  r.winner_value = detail::req_num(j, "winner_value");
  r.objective = weights_from_json(j.at("objective"));
  r.score_monotonicity_violated =
      j.at("score_monotonicity_violated").get<bool>();
  r.guarantee_void = j.at("guarantee_void").get<bool>();
  for (const auto& n : j.at("notes")) r.notes.push_back(n.get<std::string>());
  for (const auto& row : j.at("curve")) {
    if (!row.is_array() || row.size() != 7)
      throw Error(Errc::config, "curve rows must have 7 columns");
    r.curve.push_back({row[0].get<double>(), row[1].get<double>(),
                       row[2].get<double>(), row[3].get<double>(),
                       row[4].get<double>(), row[5].get<double>(),
                       row[6].get<double>()});
  }
  return r;
}

inline std::string curve_to_csv(const std::vector<SolveCurvePoint>& curve) {
  std::string out =
      "tau,gap_pos,gap_neg,prevalence_pos,prevalence_neg,value_pos,"
      "value_neg\n";
  char buf[256];
  for (const auto& p : curve) {
    std::snprintf(buf, sizeof(buf), "%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g\n",
                  p.tau, p.gap_pos, p.gap_neg, p.prevalence_pos,
                  p.prevalence_neg, p.value_pos, p.value_neg);
    out += buf;
  }
  return out;
}

// =========================================================================
// Oracle reports
// =========================================================================

inline json environment_to_json(const Environment& env) {
  return {{"cost", dist_to_json(env.cost)},
          {"r1", jnum(env.r1)},
          {"r0", jnum(env.r0)},
          {"signal",
           {{"f0", dist_to_json(env.signal.f0)},
            {"f1", dist_to_json(env.signal.f1)}}}};
}

inline const char* scheme_name(WeightScheme s) {
  switch (s) {
    case WeightScheme::accuracy_only: return "accuracy";
    case WeightScheme::general: return "general";
    case WeightScheme::mixed: return "mixed";
  }
  return "mixed";
}

inline WeightScheme scheme_from_name(const std::string& s) {
  if (s == "accuracy") return WeightScheme::accuracy_only;
  if (s == "general") return WeightScheme::general;
  if (s == "mixed") return WeightScheme::mixed;
  throw Error(Errc::config, "unknown weight scheme '" + s + "'");
}

inline json trial_config_to_json(const TrialConfig& c) {
  auto range = [](Range r) { return json::array({jnum(r.lo), jnum(r.hi)}); };
  return {{"n_trials", c.n_trials},
          {"max_steps", c.max_steps},
          {"cost_mu", range(c.cost_mu)},
          {"cost_sigma", range(c.cost_sigma)},
          {"reward", range(c.reward)},
          {"signal_shift", range(c.signal_shift)},
          {"signal_sigma", range(c.signal_sigma)},
          {"seed", c.seed},
          {"tolerance", jnum(c.tolerance)},
          {"scheme", scheme_name(c.scheme)}};
}

inline TrialConfig trial_config_from_json(const json& j) {
  TrialConfig c;
  auto range = [&](const std::string& key, Range fallback) {
    if (!j.contains(key)) return fallback;
    const json& v = j.at(key);
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() ||
        !v[1].is_number())
      throw Error(Errc::config, "range '" + key + "' must be [lo, hi]");
    return Range{v[0].get<double>(), v[1].get<double>()};
  };
  if (j.contains("n_trials")) c.n_trials = j.at("n_trials").get<int>();
  if (j.contains("max_steps")) c.max_steps = j.at("max_steps").get<int>();
  c.cost_mu = range("cost_mu", c.cost_mu);
  c.cost_sigma = range("cost_sigma", c.cost_sigma);
  c.reward = range("reward", c.reward);
  c.signal_shift = range("signal_shift", c.signal_shift);
  c.signal_sigma = range("signal_sigma", c.signal_sigma);
  if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
  c.tolerance = detail::opt_num(j, "tolerance", c.tolerance);
  if (j.contains("scheme")) c.scheme = scheme_from_name(detail::req_str(j, "scheme"));
  try {
    c.validate();
  } catch (const Error& e) {
    throw Error(Errc::config, std::string("bad trials block: ") + e.what());
  }
  return c;
}

inline json trial_report_to_json(const TrialReport& r) {
  json details = json::array();
  for (const auto& f : r.failure_details)
    details.push_back({{"trial", f.trial},
                       {"reason", f.reason},
                       {"environment", environment_to_json(f.environment)},
                       {"classifier", classifier_to_json(f.classifier)},
                       {"weights", weights_to_json(f.weights)},
                       {"gap", jnum(f.gap)},
                       {"tau_l", jnum(f.tau_l)},
                       {"tau_h", jnum(f.tau_h)},
                       {"r1_tau_l", jnum(f.r1_tau_l)},
                       {"r0_tau_l", jnum(f.r0_tau_l)},
                       {"r1_tau_h", jnum(f.r1_tau_h)},
                       {"r0_tau_h", jnum(f.r0_tau_h)},
                       {"objective_c", jnum(f.objective_c)},
                       {"best_comparator", jnum(f.best_comparator)},
                       {"slack", jnum(f.slack)}});
  return {{"seed", r.seed},
          {"scheme", scheme_name(r.scheme)},
          {"tolerance", jnum(r.tolerance)},
          {"trials_run", r.trials_run},
          {"failures", r.failures},
          {"dominance_failures", r.dominance_failures},
          {"sign_failures", r.sign_failures},
          {"equality_failures", r.equality_failures},
          {"residual_failures", r.residual_failures},
          {"sign_checked", r.sign_checked},
          {"sign_skipped", r.sign_skipped},
          {"max_dominance_slack", jnum(r.max_dominance_slack)},
          {"max_remainder_mismatch", jnum(r.max_remainder_mismatch)},
          {"max_match_residual", jnum(r.max_match_residual)},
          {"failure_details", details}};
}

inline TrialReport trial_report_from_json(const json& j) {
  TrialReport r;
  r.seed = j.at("seed").get<std::uint64_t>();
  r.scheme = scheme_from_name(detail::req_str(j, "scheme"));
  r.tolerance = detail::req_num(j, "tolerance");
  r.trials_run = j.at("trials_run").get<int>();
  r.failures = j.at("failures").get<int>();
  r.dominance_failures = j.at("dominance_failures").get<int>();
  r.sign_failures = j.at("sign_failures").get<int>();
  r.equality_failures = j.at("equality_failures").get<int>();
  r.residual_failures = j.at("residual_failures").get<int>();
  r.sign_checked = j.at("sign_checked").get<int>();
  r.sign_skipped = j.at("sign_skipped").get<int>();
  r.max_dominance_slack = detail::req_num(j, "max_dominance_slack");
  r.max_remainder_mismatch = detail::req_num(j, "max_remainder_mismatch");
  r.max_match_residual = detail::req_num(j, "max_match_residual");
  for (const auto& d : j.at("failure_details")) {
    TrialFailure f;
    f.trial = d.at("trial").get<int>();
    f.reason = detail::req_str(d, "reason");
    const json& env = d.at("environment");
    f.environment = make_environment(
        dist_from_json(env.at("cost")), detail::req_num(env, "r1"),
        detail::req_num(env, "r0"),
        make_signal_model(dist_from_json(env.at("signal").at("f0")),
                          dist_from_json(env.at("signal").at("f1"))));
    f.classifier = classifier_from_json(d.at("classifier"));
    f.weights = weights_from_json(d.at("weights"));
    f.gap = detail::req_num(d, "gap");
    f.tau_l = detail::req_num(d, "tau_l");
    f.tau_h = detail::req_num(d, "tau_h");
    f.r1_tau_l = detail::req_num(d, "r1_tau_l");
    f.r0_tau_l = detail::req_num(d, "r0_tau_l");
    f.r1_tau_h = detail::req_num(d, "r1_tau_h");
    f.r0_tau_h = detail::req_num(d, "r0_tau_h");
    f.objective_c = detail::req_num(d, "objective_c");
    f.best_comparator = detail::req_num(d, "best_comparator");
    f.slack = detail::req_num(d, "slack");
    r.failure_details.push_back(std::move(f));
  }
  return r;
}

inline json empirical_to_json(const EmpiricalEvaluation& e) {
  return {{"n", e.n},
          {"seed", e.seed},
          {"prevalence", jnum(e.prevalence)},
          {"tp", jnum(e.tp)},
          {"fn", jnum(e.fn_)},
          {"fp", jnum(e.fp)},
          {"tn", jnum(e.tn)},
          {"accuracy", jnum(e.accuracy)},
          {"se_prevalence", jnum(e.se_prevalence)},
          {"se_accuracy", jnum(e.se_accuracy)}};
}

inline EmpiricalEvaluation empirical_from_json(const json& j) {
  EmpiricalEvaluation e;
  e.n = j.at("n").get<long long>();
  e.seed = j.at("seed").get<std::uint64_t>();
  e.prevalence = detail::req_num(j, "prevalence");
  e.tp = detail::req_num(j, "tp");
  e.fn_ = detail::req_num(j, "fn");
  e.fp = detail::req_num(j, "fp");
  e.tn = detail::req_num(j, "tn");
  e.accuracy = detail::req_num(j, "accuracy");
  e.se_prevalence = detail::req_num(j, "se_prevalence");
  e.se_accuracy = detail::req_num(j, "se_accuracy");
  return e;
}

// =========================================================================
// Run configuration
// =========================================================================

struct SimulateConfig {
  long long n = 1000000;
  std::uint64_t seed = 0;
  bool operator==(const SimulateConfig&) const = default;
};

struct RunConfig {
  bool has_environment = false;
  ContinuousDist cost;
  double r1 = 0.0, r0 = 0.0;
  ContinuousDist f0, f1;
  std::string objective_preset = "accuracy";
  ObjectiveWeights weights = accuracy_weights();
  NumericsConfig numerics;
  std::optional<Classifier> classifier;
  TrialConfig trials;
  std::optional<SimulateConfig> simulate;
  std::string report_path;  // empty: report goes to stdout
  std::string csv_path;     // empty: no CSV emitted
};

inline RunConfig parse_run_config(const json& j) {
  if (!j.is_object()) throw Error(Errc::config, "config root must be an object");
  RunConfig rc;
  if (j.contains("environment")) {
    const json& env = j.at("environment");
    rc.has_environment = true;
    if (!env.contains("cost") || !env.contains("signal"))
      throw Error(Errc::config, "environment needs 'cost' and 'signal' blocks");
    try {
      rc.cost = dist_from_json(env.at("cost"));
      rc.f0 = dist_from_json(env.at("signal").at("f0"));
      rc.f1 = dist_from_json(env.at("signal").at("f1"));
    } catch (const Error& e) {
      if (e.code() == Errc::config) throw;
      throw Error(Errc::config, e.what());
    }
    rc.r1 = detail::req_num(env, "r1");
    rc.r0 = detail::req_num(env, "r0");
  }
  if (j.contains("objective")) {
    const json& obj = j.at("objective");
    rc.objective_preset = obj.contains("preset")
                              ? detail::req_str(obj, "preset")
                              : std::string("custom");
    if (rc.objective_preset == "accuracy") {
      rc.weights = accuracy_weights();
    } else if (rc.objective_preset == "compliance") {
      rc.weights = compliance_weights();
    } else if (rc.objective_preset == "custom") {
      rc.weights = weights_from_json(obj);
    } else {
      throw Error(Errc::config,
                  "unknown objective preset '" + rc.objective_preset + "'");
    }
  }
  if (j.contains("numerics")) rc.numerics = numerics_from_json(j.at("numerics"));
  if (j.contains("classifier"))
    rc.classifier = classifier_from_json(j.at("classifier"));
  if (j.contains("trials")) rc.trials = trial_config_from_json(j.at("trials"));
  if (j.contains("simulate")) {
    const json& sim = j.at("simulate");
    SimulateConfig sc;
    if (sim.contains("n")) sc.n = sim.at("n").get<long long>();
    if (sim.contains("seed")) sc.seed = sim.at("seed").get<std::uint64_t>();
    rc.simulate = sc;
  }
  if (j.contains("output")) {
    const json& out = j.at("output");
    if (out.contains("report")) rc.report_path = detail::req_str(out, "report");
    if (out.contains("csv")) rc.csv_path = detail::req_str(out, "csv");
  }
  return rc;
}

inline RunConfig parse_run_config_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(Errc::config, std::string("config parse error: ") + e.what());
  }
  return parse_run_config(j);
}

inline RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw Error(Errc::config, "cannot open config file '" + path + "'");
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return parse_run_config_text(text);
}

/// Builds and validates the environment described by a config (throws
/// Errc::mlrp_violation / Errc::reward / ... on model problems).
inline Environment build_environment(const RunConfig& rc) {
  if (!rc.has_environment)
    throw Error(Errc::config, "this command requires an 'environment' block");
  return make_environment(rc.cost, rc.r1, rc.r0,
                          make_signal_model(rc.f0, rc.f1, 2001, rc.numerics));
}

// The resolved configuration, echoed into every report.
inline json config_echo(const RunConfig& rc) {
  json j;
  if (rc.has_environment)
    j["environment"] = {{"cost", dist_to_json(rc.cost)},
                        {"r1", jnum(rc.r1)},
                        {"r0", jnum(rc.r0)},
                        {"signal",
                         {{"f0", dist_to_json(rc.f0)},
                          {"f1", dist_to_json(rc.f1)}}}};
  j["objective"] = weights_to_json(rc.weights);
  j["objective"]["preset"] = rc.objective_preset;
  j["numerics"] = numerics_to_json(rc.numerics);
  if (rc.classifier) j["classifier"] = classifier_to_json(*rc.classifier);
  if (rc.simulate)
    j["simulate"] = {{"n", rc.simulate->n}, {"seed", rc.simulate->seed}};
  return j;
}

// =========================================================================
// Atomic file output
// =========================================================================

inline void write_text_atomic(const std::string& path,
                              const std::string& text) {
  namespace fs = std::filesystem;
  fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out)
      throw Error(Errc::config, "cannot write to '" + tmp.string() + "'");
    out << text;
  }
  fs::rename(tmp, target);
}

}  // namespace perfclass
