// Acceptance suite: one PASS/FAIL line per criterion A1-A8. Exits nonzero
// when any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "fixtures.h"
#include "oracles.h"
#include "rsched/experiment.h"
#include "rsched/montecarlo.h"
#include "rsched/oracle.h"
#include "rsched/policies.h"
#include "rsched/relax.h"

using namespace rsched;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Collects failed checks; the first few are kept for the report line.
class Checker {
 public:
  void expect(bool ok, const std::string& what) {
    ++checks_;
    if (ok) return;
    ++failures_;
    if (failures_ <= 3) messages_ += (messages_.empty() ? "" : "; ") + what;
  }
  void near(double got, double want, double tol, const std::string& what) {
    std::ostringstream msg;
    msg.precision(12);
    msg << what << ": " << got << " vs " << want;
    expect(std::abs(got - want) <= tol, msg.str());
  }
  void note(const std::string& text) { extra_ += (extra_.empty() ? "" : "; ") + text; }
  Outcome outcome() const {
    std::ostringstream out;
    out << checks_ << " checks";
    if (failures_ > 0) out << ", " << failures_ << " failed: " << messages_;
    if (!extra_.empty()) out << "; " << extra_;
    return {failures_ == 0, out.str()};
  }

 private:
  long checks_ = 0;
  long failures_ = 0;
  std::string messages_;
  std::string extra_;
};

double solve(const LPModel& model) {
  const LPSolution sol = solve_lp(model);
  if (sol.status != LPStatus::kOptimal) throw SolverError("LP status " + to_string(sol.status));
  return sol.objective;
}

// Instances seen by the suite; A6 re-solves their CDLP pairs.
std::vector<std::shared_ptr<const Instance>> g_instances;

std::shared_ptr<const Instance> keep(Instance inst) {
  auto ptr = std::make_shared<const Instance>(std::move(inst));
  g_instances.push_back(ptr);
  return ptr;
}

Outcome a1_examples() {
  Checker c;
  const auto ex = keep(*rsched::testing::example1());
  const auto& law2 = ex->exact_tasks()[1].law;
  c.expect(conflict_probability(law2, 1, 2) == Rational(1, 2), "conflict probability");
  const auto cond = condition_on_avoid(law2, 1, 2);
  c.expect(cond && cond->size() == 1 && cond->prob(3, 3) == 1, "conditioned joint");
  for (ModelKind model : {ModelKind::kDSRSE, ModelKind::kCDSRSE}) {
    const OracleValue v = dp_value(*ex, model);
    c.expect(v.exact && v.exact_value == Rational(3, 2), "dp_value " + to_string(model));
  }
  c.near(solve(build_cdlp_p(*ex)), 1.5, 1e-9, "CDLP-P");

  const PriorityPolicy first({1, 2});
  const auto occupancy = occupancy_profile(*ex);
  auto slot2_load = [&](const PolicyOccupancy& o) {
    return occupancy.occ(1, 2) * o.scheduled[0] + occupancy.occ(2, 2) * o.scheduled[1];
  };
  const PolicyOccupancy d = policy_occupancy_exact(ex, ModelKind::kDSRSE, first);
  const PolicyOccupancy k = policy_occupancy_exact(ex, ModelKind::kCDSRSE, first);
  c.near(slot2_load(d), 1.25, 1e-12, "DSRSE slot-2 load");
  c.near(d.slot_occupied[1], 1.0, 1e-12, "DSRSE slot-2 occupancy");
  c.near(slot2_load(k), 1.0, 1e-12, "CDSRSE slot-2 load");
  return c.outcome();
}

Outcome a2_sandwich() {
  Checker c;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const auto inst = keep(rsched::testing::random_small_instance(seed, 5, 10));
    const std::string tag = "seed " + std::to_string(seed);
    const double alpha = alpha_pes(*inst).value;
    const Estimate stab = estimate_expected_stability(*inst, 2000, seed);
    const double dlp = solve(build_dlp_p(*inst));
    const double cdlp = solve(build_cdlp_p(*inst));
    for (ModelKind model : {ModelKind::kDSRSE, ModelKind::kCDSRSE}) {
      const double dp = dp_value(*inst, model).value;
      const double lp = model == ModelKind::kDSRSE ? dlp : cdlp;
      const std::string where = tag + " " + to_string(model);
      c.expect(alpha - 1e-6 <= dp, where + ": alpha_pes > dp");
      c.expect(dp <= lp + 1e-6, where + ": dp > LP");
      c.expect(dp <= stab.mean + 3.0 * stab.std_error + 1e-9, where + ": dp > stability + 3se");
    }
  }
  return c.outcome();
}

Outcome a3_tightness() {
  Checker c;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto inst = keep(point_mass_instance(5, 10, seed));
    const std::string tag = "seed " + std::to_string(seed);
    const PessimisticGraph g = pessimistic_graph(*inst);
    const double wis = wis_value(g.spans, g.weights);
    const AlphaPes a = alpha_pes(*inst);
    c.near(a.value, wis, 1e-6, tag + " alpha_pes");
    c.near(solve(build_dlp_p(*inst)), wis, 1e-6, tag + " DLP-P");
    c.near(solve(build_cdlp_p(*inst)), wis, 1e-6, tag + " CDLP-P");
    c.near(solve(build_lp_dpes(*inst)), wis, 1e-6, tag + " LP-Dpes");
    c.near(dual_upper_bound_dsrse(*inst, a.mu), wis, 1e-6, tag + " dual bound");
    c.near(dp_value(*inst, ModelKind::kDSRSE).value, wis, 1e-6, tag + " dp DSRSE");
    c.near(dp_value(*inst, ModelKind::kCDSRSE).value, wis, 1e-6, tag + " dp CDSRSE");
  }
  return c.outcome();
}

Outcome a4_single_slot() {
  Checker c;
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    Rng rng = Rng::stream(seed, StreamTag::kFixture, 40);
    const int n = static_cast<int>(rng.uniform_int(1, 5));
    const int m = static_cast<int>(rng.uniform_int(2, 8));
    const auto inst = keep(single_slot_instance(n, m, seed));
    const PriorityPolicy greedy = PriorityPolicy::by_weight(*inst);
    const PolicyValue pv = policy_value_exact(inst, ModelKind::kDSRSE, greedy, {}, Arithmetic::kExact);
    const OracleValue ov = dp_value(*inst, ModelKind::kDSRSE, {}, Arithmetic::kExact);
    c.expect(pv.exact && ov.exact && pv.exact_value == ov.exact_value,
             "seed " + std::to_string(seed) + ": " + to_string(pv.exact_value) + " vs " + to_string(ov.exact_value));
  }
  return c.outcome();
}

Outcome a5_star() {
  Checker c;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const int n = 1 + static_cast<int>((seed - 1) % 8);
    const StarParams params = random_star_params(n, seed);
    const auto star = keep(star_instance(params.p, params.w, params.w0));
    std::vector<double> q;
    for (double p : params.p) q.push_back(1.0 - p);
    const double closed = conserv_js_opt(q, params.w, params.w0).value;
    const double dp = dp_value(*star, ModelKind::kCDSRSE, OracleLimits{n + 1, 2 * n}).value;
    c.near(closed, dp, 1e-9, "seed " + std::to_string(seed) + " n=" + std::to_string(n));
  }
  return c.outcome();
}

Outcome a6_lp() {
  Checker c;
  std::map<LPStatus, int> seen;
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    const LPModel model = rsched::testing::random_lp(seed);
    const auto ref = rsched::testing::enumerate_lp(model);
    const LPSolution sol = solve_lp(model);
    const std::string tag = "lp " + std::to_string(seed);
    c.expect(sol.status == ref.status, tag + ": status " + to_string(sol.status) + " vs " + to_string(ref.status));
    ++seen[ref.status];
    if (sol.status == LPStatus::kOptimal && ref.status == LPStatus::kOptimal) {
      c.near(sol.objective, ref.objective, 1e-7 * std::max(1.0, std::abs(ref.objective)), tag);
    }
  }
  for (const auto& inst : g_instances) {
    c.near(solve(build_cdlp_p(*inst)), solve(build_cdlp_d(*inst)), 1e-6, "CDLP pair");
  }
  c.note(std::to_string(seen[LPStatus::kOptimal]) + " optimal, " + std::to_string(seen[LPStatus::kInfeasible]) +
         " infeasible, " + std::to_string(seen[LPStatus::kUnbounded]) + " unbounded LPs; " +
         std::to_string(g_instances.size()) + " CDLP pairs");
  return c.outcome();
}

ExperimentConfig desk_config() {
  ExperimentConfig config;
  config.sizes = kDeskSizes;
  config.instances = 10;
  config.rollouts = 500;
  config.stability_samples = 500;
  config.seed = 20240601;
  return config;
}

std::string g_desk_csv;

Outcome a7_orderings() {
  Checker c;
  const auto rows = run_experiment(desk_config());
  std::ostringstream csv;
  write_results_csv(rows, csv);
  g_desk_csv = csv.str();

  std::map<std::string, std::pair<double, long>> mean;  // model/metric -> (sum, count)
  std::map<std::tuple<int, int, int, int>, std::map<std::string, const ResultRow*>> cdsrse;
  for (const ResultRow& r : rows) {
    if (r.instance < 0 || !r.normalized) continue;
    auto& m = mean[to_string(r.model) + "/" + r.metric];
    m.first += *r.normalized;
    ++m.second;
    if (r.model == ModelKind::kCDSRSE) {
      cdsrse[{r.size_n, r.size_m, static_cast<int>(r.family), r.instance}][r.metric] = &r;
    }
  }
  auto avg = [&](const std::string& key) {
    const auto it = mean.find(key);
    return it == mean.end() || it->second.second == 0 ? std::nan("") : it->second.first / it->second.second;
  };
  const double dlp = avg("dsrse/dlp_p");
  const double weight = avg("dsrse/policy_weight");
  const double ratio = avg("dsrse/policy_ratio");
  const double alpha = avg("dsrse/alpha_pes");
  const double cdlp = avg("cdsrse/cdlp_p");
  c.expect(dlp >= 1.0 && dlp <= 1.25, "(i) dlp_p mean " + std::to_string(dlp));
  c.expect(weight >= ratio, "(ii) weight " + std::to_string(weight) + " < ratio " + std::to_string(ratio));
  c.expect(alpha <= 0.95, "(iii) alpha_pes mean " + std::to_string(alpha));
  c.expect(cdlp <= 1.02, "(iv) cdlp_p mean " + std::to_string(cdlp));
  for (const auto& [key, metrics] : cdsrse) {
    const auto lp = metrics.find("cdlp_p");
    if (lp == metrics.end() || !lp->second->value) {
      c.expect(false, "(v) missing cdlp_p");
      continue;
    }
    for (const char* name : {"policy_ratio", "policy_weight"}) {
      const auto p = metrics.find(name);
      if (p == metrics.end()) continue;
      c.expect(*p->second->value <= *lp->second->value + 3.0 * p->second->std_error + 1e-9,
               std::string("(v) ") + name + " above cdlp_p");
    }
  }
  char buf[200];
  std::snprintf(buf, sizeof buf, "dlp_p %.4f, weight %.4f, ratio %.4f, alpha_pes %.4f, cdlp_p %.4f", dlp, weight,
                ratio, alpha, cdlp);
  c.note(buf);
  return c.outcome();
}

Outcome a8_reproducible() {
  Checker c;
  ExperimentConfig config = desk_config();
  config.threads = 1;
  std::ostringstream one;
  write_results_csv(run_experiment(config), one);
  c.expect(!g_desk_csv.empty(), "A7 CSV missing");
  c.expect(one.str() == g_desk_csv, "desk CSV differs between default and single-thread runs");

  ExperimentConfig small;
  small.sizes = {{6, 10}};
  small.instances = 3;
  small.rollouts = 50;
  small.stability_samples = 50;
  small.seed = 7;
  std::ostringstream a;
  std::ostringstream b;
  write_results_csv(run_experiment(small), a);
  small.threads = 3;
  write_results_csv(run_experiment(small), b);
  c.expect(a.str() == b.str(), "small CSV differs between reruns");
  c.note(std::to_string(one.str().size()) + " CSV bytes compared");
  return c.outcome();
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"A1", a1_examples},   {"A2", a2_sandwich}, {"A3", a3_tightness},   {"A4", a4_single_slot},
      {"A5", a5_star},       {"A6", a6_lp},       {"A7", a7_orderings},   {"A8", a8_reproducible},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s %s (%.2f s) %s\n", name, out.pass ? "PASS" : "FAIL", secs, out.detail.c_str());
    std::fflush(stdout);
    if (!out.pass) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
