// Command-line front end: solve | evaluate | verify | simulate |
// paper-example. JSON config in, JSON report out (stdout or --out), CSV
// curve via --csv. Exit codes: 0 success, 1 verification failure,
// 2 usage/config error, 3 model validation error.

#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "perfclass/perfclass.hpp"

namespace pc = perfclass;
using pc::json;

namespace {

int exit_code_for(pc::Errc code) {
  switch (code) {
    case pc::Errc::mlrp_violation:
    case pc::Errc::crossing_not_found:
    case pc::Errc::reward:
      return 3;
    default:
      return 2;
  }
}

void emit_report(const json& doc, const std::string& path) {
  std::string text = doc.dump(2);
  text += '\n';
  if (path.empty())
    std::cout << text;
  else
    pc::write_text_atomic(path, text);
}

struct CommonArgs {
  std::string config_path;
  std::string out_path;
  std::string csv_path;
  long long seed = 0;
  bool seed_set = false;
};

pc::RunConfig load_config(const CommonArgs& args, bool required) {
  if (args.config_path.empty()) {
    if (required)
      throw pc::Error(pc::Errc::config, "--config <path> is required");
    return pc::RunConfig{};
  }
  return pc::load_run_config(args.config_path);
}

// Flags override the corresponding config fields.
void apply_overrides(pc::RunConfig& rc, const CommonArgs& args) {
  if (!args.out_path.empty()) rc.report_path = args.out_path;
  if (!args.csv_path.empty()) rc.csv_path = args.csv_path;
  if (args.seed_set) {
    rc.trials.seed = static_cast<std::uint64_t>(args.seed);
    if (rc.simulate) rc.simulate->seed = static_cast<std::uint64_t>(args.seed);
  }
}

int cmd_solve(const CommonArgs& args) {
  pc::RunConfig rc = load_config(args, true);
  apply_overrides(rc, args);
  const pc::Environment env = pc::build_environment(rc);
  const pc::SolveReport rep = pc::solve_optimal(env, rc.weights, rc.numerics);
  if (rep.guarantee_void)
    std::cerr << "warning: " << rep.notes.front() << "\n";
  json doc = {{"command", "solve"},
              {"config", pc::config_echo(rc)},
              {"result", pc::solve_report_to_json(rep)}};
  emit_report(doc, rc.report_path);
  if (!rc.csv_path.empty())
    pc::write_text_atomic(rc.csv_path, pc::curve_to_csv(rep.curve));
  return 0;
}

int cmd_evaluate(const CommonArgs& args) {
  pc::RunConfig rc = load_config(args, true);
  apply_overrides(rc, args);
  if (!rc.classifier)
    throw pc::Error(pc::Errc::config, "evaluate requires a 'classifier' block");
  const pc::Environment env = pc::build_environment(rc);
  const pc::Evaluation ev = pc::evaluate(env, *rc.classifier);
  json result = {{"classifier", pc::classifier_to_json(*rc.classifier)},
                 {"evaluation", pc::evaluation_to_json(ev)},
                 {"objective_value",
                  pc::jnum(pc::objective_value(env, *rc.classifier, rc.weights))},
                 {"weights", pc::weights_to_json(rc.weights)}};
  try {
    result["conditions"] = pc::condition_report_to_json(
        pc::check_conditions(env, *rc.classifier, rc.weights, rc.numerics));
  } catch (const pc::Error& e) {
    if (e.code() != pc::Errc::zero_gap &&
        e.code() != pc::Errc::degenerate_objective)
      throw;
    result["conditions"] = nullptr;
    result["condition_notice"] = e.what();
  }
  json doc = {{"command", "evaluate"},
              {"config", pc::config_echo(rc)},
              {"result", result}};
  emit_report(doc, rc.report_path);
  return 0;
}

int cmd_verify(const CommonArgs& args) {
  pc::RunConfig rc = load_config(args, !args.config_path.empty());
  apply_overrides(rc, args);
  const pc::TrialReport rep = pc::run_suite(rc.trials);
  json doc = {{"command", "verify"},
              {"config", {{"trials", pc::trial_config_to_json(rc.trials)}}},
              {"result", pc::trial_report_to_json(rep)}};
  emit_report(doc, rc.report_path);
  if (rep.failures > 0) {
    std::cerr << "verification failed: " << rep.failures << " of "
              << rep.trials_run << " trials\n";
    return 1;
  }
  return 0;
}

int cmd_simulate(const CommonArgs& args) {
  pc::RunConfig rc = load_config(args, true);
  apply_overrides(rc, args);
  if (!rc.classifier)
    throw pc::Error(pc::Errc::config, "simulate requires a 'classifier' block");
  const pc::SimulateConfig sim = rc.simulate.value_or(pc::SimulateConfig{});
  const pc::Environment env = pc::build_environment(rc);
  const pc::Evaluation analytic = pc::evaluate(env, *rc.classifier);
  const pc::EmpiricalEvaluation emp =
      pc::simulate_population(env, *rc.classifier, sim.n, sim.seed);
  auto z = [](double observed, double expected, double se) {
    return se > 0.0 ? (observed - expected) / se : 0.0;
  };
  json result = {
      {"classifier", pc::classifier_to_json(*rc.classifier)},
      {"analytic", pc::evaluation_to_json(analytic)},
      {"empirical", pc::empirical_to_json(emp)},
      {"z",
       {{"prevalence",
         pc::jnum(z(emp.prevalence, analytic.prevalence, emp.se_prevalence))},
        {"accuracy",
         pc::jnum(z(emp.accuracy, analytic.accuracy, emp.se_accuracy))}}}};
  json doc = {{"command", "simulate"},
              {"config", pc::config_echo(rc)},
              {"result", result}};
  emit_report(doc, rc.report_path);
  return 0;
}

int cmd_paper_example(const CommonArgs& args) {
  const pc::Environment env = pc::worked_example_environment();
  const pc::ObjectiveWeights w = pc::accuracy_weights();
  const pc::SolveReport rep = pc::solve_optimal(env, w);

  auto family_row = [&](pc::ThresholdFamily fam, double tau) {
    const pc::Evaluation ev =
        pc::evaluate(env, pc::threshold_rule(fam, tau));
    return json{{"tau", pc::jnum(tau)},
                {"r_gap", pc::jnum(env.r * ev.gap)},
                {"prevalence", pc::jnum(ev.prevalence)},
                {"accuracy", pc::jnum(ev.accuracy)}};
  };
  json pos = family_row(pc::ThresholdFamily::positive, rep.best_positive.tau);
  json neg = family_row(pc::ThresholdFamily::negative, rep.best_negative.tau);

  std::printf("%-10s %12s %12s %12s %12s\n", "family", "tau", "r*gap",
              "prevalence", "accuracy");
  auto print_row = [](const char* name, const json& row) {
    std::printf("%-10s %12.5f %12.5f %12.5f %12.5f\n", name,
                row.at("tau").get<double>(), row.at("r_gap").get<double>(),
                row.at("prevalence").get<double>(),
                row.at("accuracy").get<double>());
  };
  print_row("positive", pos);
  print_row("negative", neg);
  std::printf("winner: %s threshold, value %.5f\n",
              pc::winner_name(rep.winner), rep.winner_value);
  std::printf("score monotonicity violated: %s\n",
              rep.score_monotonicity_violated ? "yes" : "no");

  if (!args.out_path.empty() || !args.csv_path.empty()) {
    pc::RunConfig rc;
    rc.has_environment = true;
    rc.cost = env.cost;
    rc.r1 = env.r1;
    rc.r0 = env.r0;
    rc.f0 = env.signal.f0;
    rc.f1 = env.signal.f1;
    json result = pc::solve_report_to_json(rep);
    result["positive_family"] = pos;
    result["negative_family"] = neg;
    json doc = {{"command", "paper-example"},
                {"config", pc::config_echo(rc)},
                {"result", result}};
    if (!args.out_path.empty()) emit_report(doc, args.out_path);
    if (!args.csv_path.empty())
      pc::write_text_atomic(args.csv_path, pc::curve_to_csv(rep.curve));
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"optimal binary classification when behavior responds to the "
               "committed classifier"};
  app.require_subcommand(1);

  CommonArgs args;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", args.config_path, "JSON run configuration");
    sub->add_option("--out", args.out_path, "report output path (default: stdout)");
    sub->add_option("--csv", args.csv_path, "objective-curve CSV output path");
    sub->add_option("--seed", args.seed, "override the config seed")
        ->each([&](const std::string&) { args.seed_set = true; });
  };

  CLI::App* solve = app.add_subcommand(
      "solve", "optimize both threshold families and the constant rules");
  CLI::App* eval = app.add_subcommand(
      "evaluate", "evaluate one classifier: gap, prevalence, confusion cells");
  CLI::App* verify = app.add_subcommand(
      "verify", "randomized dominance and remainder-sign verification");
  CLI::App* simulate = app.add_subcommand(
      "simulate", "seeded Monte Carlo population cross-check");
  CLI::App* example = app.add_subcommand(
      "paper-example", "solve the built-in worked example and print a table");
  for (CLI::App* sub : {solve, eval, verify, simulate, example})
    add_common(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (solve->parsed()) return cmd_solve(args);
    if (eval->parsed()) return cmd_evaluate(args);
    if (verify->parsed()) return cmd_verify(args);
    if (simulate->parsed()) return cmd_simulate(args);
    if (example->parsed()) return cmd_paper_example(args);
  } catch (const pc::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
