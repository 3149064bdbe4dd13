// rsched: command-line front end.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include "rsched/experiment.h"
#include "rsched/gen.h"
#include "rsched/instance_io.h"
#include "rsched/montecarlo.h"
#include "rsched/oracle.h"
#include "rsched/policies.h"
#include "rsched/relax.h"

namespace {

using namespace rsched;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitSolver = 3;

// Where an instance comes from: a JSON file or the generator flags.
struct InstanceSource {
  std::string path;
  int n = 8;
  int m = 12;
  std::uint64_t seed = 1;
  std::string family = "dense-base";

  void add_to(CLI::App& cmd) {
    cmd.add_option("--instance", path, "Instance JSON file (overrides the generator flags)");
    cmd.add_option("--n", n, "Number of tasks to generate")->check(CLI::PositiveNumber);
    cmd.add_option("--m", m, "Number of slots")->check(CLI::Range(2, 1 << 20));
    cmd.add_option("--seed", seed, "Master seed");
    cmd.add_option("--family", family, "dense-base, sparse-base, dense-long or sparse-long");
  }

  std::shared_ptr<const Instance> load() const {
    if (!path.empty()) return std::make_shared<const Instance>(load_instance(path));
    return std::make_shared<const Instance>(make_family(generate_instance(n, m, seed), parse_family(family)));
  }
};

std::string format(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

void print_value(const std::string& key, double v) { std::cout << key << " = " << format(v) << "\n"; }

int run_report(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path);
  const std::vector<ResultRow> rows = read_results_csv(in);
  const auto problems = validate_results(rows);
  std::cout << "size,family,model,metric,mean,normalized,stderr\n";
  for (const ResultRow& r : rows) {
    if (r.instance >= 0) continue;
    std::cout << r.size_n << "x" << r.size_m << "," << to_string(r.family) << "," << to_string(r.model) << ","
              << r.metric << "," << (r.value ? format(*r.value) : "") << ","
              << (r.normalized ? format(*r.normalized) : "") << "," << format(r.std_error) << "\n";
  }
  for (const std::string& p : problems) std::cerr << "inconsistent: " << p << "\n";
  std::cerr << rows.size() << " rows, " << problems.size() << " inconsistencies\n";
  return problems.empty() ? kExitOk : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sequential interval scheduling with random start and end times"};
  app.require_subcommand(1);

  InstanceSource source;
  std::string out_path;
  std::string model_name = "dsrse";
  std::string policy_name = "weight";
  long rollouts = 1000;
  long samples = 1000;
  int threads = 0;
  int max_dp_n = OracleLimits{}.max_n;
  int max_dp_m = OracleLimits{}.max_m;
  bool static_ratio = false;
  bool box = false;

  auto* gen = app.add_subcommand("gen", "Generate an instance and write it as JSON");
  source.add_to(*gen);
  gen->add_option("--out", out_path, "Output file (default: stdout)");

  auto* simulate = app.add_subcommand("simulate", "Estimate a policy's value by simulation");
  source.add_to(*simulate);
  simulate->add_option("--model", model_name, "dsrse or cdsrse")->check(CLI::IsMember({"dsrse", "cdsrse"}));
  simulate->add_option("--policy", policy_name, "ratio, weight, random or dp")
      ->check(CLI::IsMember({"ratio", "weight", "random", "dp"}));
  simulate->add_option("--rollouts", rollouts, "Number of episodes")->check(CLI::PositiveNumber);
  simulate->add_option("--samples", samples, "Samples for the expected stability number")->check(CLI::PositiveNumber);
  simulate->add_flag("--static-ratio", static_ratio, "Ratio policy uses initial expected lengths");
  simulate->add_option("--max-dp-n", max_dp_n, "Largest n for the dp policy");
  simulate->add_option("--max-dp-m", max_dp_m, "Largest m for the dp policy");
  simulate->add_option("--threads", threads, "Worker threads (0: all cores)");

  auto* dp = app.add_subcommand("dp", "Exact optimal expected value of a small instance");
  source.add_to(*dp);
  dp->add_option("--model", model_name, "dsrse or cdsrse")->check(CLI::IsMember({"dsrse", "cdsrse"}));
  dp->add_option("--max-dp-n", max_dp_n, "Largest n accepted");
  dp->add_option("--max-dp-m", max_dp_m, "Largest m accepted");

  std::string relaxation;
  auto* lp = app.add_subcommand("lp", "Solve the LP relaxation of a model");
  source.add_to(*lp);
  lp->add_option("--model", model_name, "dsrse (DLP-P) or cdsrse (CDLP-P)")
      ->check(CLI::IsMember({"dsrse", "cdsrse"}));
  lp->add_option("--relaxation", relaxation, "Override: dlp_p, lp_dpes, cdlp_p, cdlp_d, lp_p or lp_d")
      ->check(CLI::IsMember({"dlp_p", "lp_dpes", "cdlp_p", "cdlp_d", "lp_p", "lp_d"}));
  lp->add_flag("--box", box, "Add x <= 1 to CDLP-P");
  lp->add_option("--out", out_path, "Also write the model in LP text format");

  bool no_lps = false;
  auto* bounds = app.add_subcommand("bounds", "Pessimistic value and closed-form upper bounds");
  source.add_to(*bounds);
  bounds->add_flag("--box", box, "Add x <= 1 to CDLP-P");
  bounds->add_flag("--no-lp", no_lps, "Skip the LP relaxations");

  ExperimentConfig config;
  std::string sizes = format_sizes(config.sizes);
  std::vector<std::string> families;
  std::vector<std::string> models;
  std::vector<std::string> policies;
  bool point_mass = false;
  auto* experiment = app.add_subcommand("experiment", "Run the experiment grid and write a results CSV");
  experiment->set_config("--config", "", "INI or TOML file with any of these options");
  experiment->add_option("--sizes", sizes, "Comma-separated NxM sizes, e.g. 8x12,10x15");
  experiment->add_option("--instances", config.instances, "Instances per size")->check(CLI::PositiveNumber);
  experiment->add_option("--rollouts", config.rollouts, "Episodes per policy")->check(CLI::PositiveNumber);
  experiment->add_option("--samples", config.stability_samples, "Samples for the expected stability number")
      ->check(CLI::PositiveNumber);
  experiment->add_option("--seed", config.seed, "Master seed");
  experiment->add_option("--family", families, "Families (default: all four)")
      ->delimiter(',')
      ->check(CLI::IsMember({"dense-base", "sparse-base", "dense-long", "sparse-long"}));
  experiment->add_option("--model", models, "Models (default: both)")
      ->delimiter(',')
      ->check(CLI::IsMember({"dsrse", "cdsrse"}));
  experiment->add_option("--policy", policies, "Policies (default: ratio,weight)")
      ->delimiter(',')
      ->check(CLI::IsMember({"ratio", "weight", "random", "dp"}));
  experiment->add_option("--out", out_path, "Results CSV (default: stdout)");
  experiment->add_flag("--box", config.box, "Add x <= 1 to CDLP-P");
  experiment->add_flag("--static-ratio", config.static_ratio, "Ratio policy uses initial expected lengths");
  experiment->add_flag("--allow-slow", config.allow_slow, "Solve DLP-P for n >= 40");
  experiment->add_flag("--point-mass", point_mass, "Deterministic instances instead of the uniform generator");
  experiment->add_option("--max-dp-n", config.dp_limits.max_n, "dp_value rows for instances with n up to this");
  experiment->add_option("--max-dp-m", config.dp_limits.max_m, "dp_value rows for instances with m up to this");
  experiment->add_option("--threads", config.threads, "Worker threads (0: all cores)");

  std::string csv_path;
  auto* report = app.add_subcommand("report", "Validate a results CSV and print its aggregate rows");
  report->add_option("csv", csv_path, "Results CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    const ModelKind model = parse_model(model_name);
    if (*gen) {
      const std::string json = instance_to_json(*source.load());
      if (out_path.empty()) {
        std::cout << json;
      } else {
        std::ofstream(out_path) << json;
      }
    } else if (*simulate) {
      const auto instance = source.load();
      PolicyOptions options;
      options.static_ratio = static_ratio;
      options.dp_limits = {max_dp_n, max_dp_m};
      const auto policy = make_policy(parse_policy(policy_name), instance, model, options);
      const Estimate est = estimate_policy_value(instance, model, *policy, rollouts, source.seed, threads);
      const Estimate stab = estimate_expected_stability(*instance, samples, source.seed, threads);
      std::cout << "policy = " << policy->name() << "\nmodel = " << to_string(model) << "\n";
      print_value("mean", est.mean);
      print_value("stderr", est.std_error);
      std::cout << "rollouts = " << est.n_samples << "\nseed = " << est.seed << "\n";
      print_value("expected_stab", stab.mean);
      print_value("expected_stab_stderr", stab.std_error);
      if (stab.mean > 0.0) print_value("normalized", est.mean / stab.mean);
    } else if (*dp) {
      const auto instance = source.load();
      const OracleValue v = dp_value(*instance, model, {max_dp_n, max_dp_m});
      std::cout << "model = " << to_string(model) << "\n";
      if (v.exact) std::cout << "exact = " << to_string(v.exact_value) << "\n";
      print_value("value", v.value);
    } else if (*lp) {
      const auto instance = source.load();
      if (relaxation.empty()) relaxation = model == ModelKind::kDSRSE ? "dlp_p" : "cdlp_p";
      LPModel lp_model;
      if (relaxation == "dlp_p") lp_model = build_dlp_p(*instance);
      else if (relaxation == "lp_dpes") lp_model = build_lp_dpes(*instance);
      else if (relaxation == "cdlp_p") lp_model = build_cdlp_p(*instance, box);
      else if (relaxation == "cdlp_d") lp_model = build_cdlp_d(*instance);
      else if (relaxation == "lp_p") lp_model = build_lp_p(pessimistic_graph(*instance));
      else lp_model = build_lp_d(pessimistic_graph(*instance));
      if (!out_path.empty()) {
        std::ofstream out(out_path);
        write_lp_text(lp_model, out);
      }
      const LPSolution sol = solve_lp(lp_model);
      std::cout << "relaxation = " << relaxation << "\nstatus = " << to_string(sol.status) << "\n";
      std::cout << "columns = " << lp_model.num_variables() << "\nrows = " << lp_model.num_rows()
                << "\niterations = " << sol.iterations << "\n";
      if (sol.status != LPStatus::kOptimal) return kExitSolver;
      print_value("objective", sol.objective);
    } else if (*bounds) {
      const auto instance = source.load();
      BoundsOptions options;
      options.solve_lps = !no_lps;
      options.box = box;
      const BoundsReport r = compute_bounds(*instance, options);
      print_value("alpha_pes", r.alpha_pes);
      print_value("dual_bound_dsrse", r.dsrse_dual_bound);
      print_value("p_star", r.p_star);
      print_value("pstar_bound", r.cdsrse_pstar_bound);
      if (r.uniform_dsrse_bound) print_value("uniform_dsrse_bound", *r.uniform_dsrse_bound);
      if (r.uniform_cdsrse_bound) print_value("uniform_cdsrse_bound", *r.uniform_cdsrse_bound);
      if (r.dlp_value) print_value("dlp_p", *r.dlp_value);
      if (r.lp_dpes_value) print_value("lp_dpes", *r.lp_dpes_value);
      if (r.cdlp_value) print_value("cdlp_p", *r.cdlp_value);
      if (!r.multiply_covered.empty()) {
        std::cerr << "warning: " << r.multiply_covered.size()
                  << " task span(s) contain more than one stabbing point\n";
      }
    } else if (*experiment) {
      config.sizes = parse_sizes(sizes);
      if (!families.empty()) {
        config.families.clear();
        for (const auto& f : families) config.families.push_back(parse_family(f));
      }
      if (!models.empty()) {
        config.models.clear();
        for (const auto& m : models) config.models.push_back(parse_model(m));
      }
      if (!policies.empty()) {
        config.policies.clear();
        for (const auto& p : policies) config.policies.push_back(parse_policy(p));
      }
      if (point_mass) config.generator = InstanceGenerator::kPointMass;
      const auto rows = run_experiment(config, &std::cerr);
      if (out_path.empty()) {
        write_results_csv(rows, std::cout);
      } else {
        std::ofstream out(out_path);
        write_results_csv(rows, out);
      }
    } else if (*report) {
      return run_report(csv_path);
    }
  } catch (const SolverError& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return kExitSolver;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitOk;
}
