#include "rsched/experiment.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <tuple>

#include "rsched/montecarlo.h"
#include "rsched/random.h"
#include "rsched/relax.h"

namespace rsched {
namespace {

int family_index(FamilyTag f) { return static_cast<int>(f); }

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> parts;
  std::string current;
  std::istringstream in(line);
  while (std::getline(in, current, sep)) parts.push_back(current);
  if (!line.empty() && line.back() == sep) parts.emplace_back();
  return parts;
}

auto row_key(const ResultRow& r) {
  return std::make_tuple(r.size_n, r.size_m, family_index(r.family), static_cast<int>(r.model),
                         r.metric);
}

struct CellJob {
  SizeSpec size;
  FamilyTag family;
  int instance;
};

class CellRunner {
 public:
  CellRunner(const ExperimentConfig& config, std::ostream* log, std::mutex& log_mutex)
      : config_(config), log_(log), log_mutex_(log_mutex) {}

  std::vector<ResultRow> run(const CellJob& job) const {
    const std::uint64_t base_seed = cell_seed(config_.seed, job.size, job.instance);
    const Instance base = config_.generator == InstanceGenerator::kPointMass
                              ? point_mass_instance(job.size.n, job.size.m, base_seed)
                              : generate_instance(job.size.n, job.size.m, base_seed);
    const auto inst = std::make_shared<const Instance>(make_family(base, job.family));
    const std::uint64_t seed =
        derive_seed(base_seed, StreamTag::kExperimentCell, static_cast<std::uint64_t>(family_index(job.family)) + 1);

    std::vector<ResultRow> rows;
    auto emit = [&](ModelKind model, const std::string& metric, std::optional<double> value,
                    double std_error, std::uint64_t row_seed) {
      ResultRow row;
      row.size_n = job.size.n;
      row.size_m = job.size.m;
      row.family = job.family;
      row.model = model;
      row.instance = job.instance;
      row.metric = metric;
      row.value = value;
      row.std_error = std_error;
      row.seed = row_seed;
      rows.push_back(std::move(row));
    };
    auto attempt = [&](const std::string& what, auto f) -> std::optional<double> {
      try {
        return f();
      } catch (const Error& e) {
        note(job, what + ": " + e.what());
        return std::nullopt;
      }
    };

    const Estimate stab = estimate_expected_stability(*inst, config_.stability_samples, seed, 1);
    std::optional<AlphaPes> ap;
    try {
      ap = alpha_pes(*inst);
    } catch (const Error& e) {
      note(job, std::string("alpha_pes: ") + e.what());
    }
    const bool lp_ok = config_.solve_lps;
    const bool dlp_ok = lp_ok && (config_.allow_slow || job.size.n < kSlowN);

    for (ModelKind model : config_.models) {
      emit(model, "expected_stab", stab.mean, stab.std_error, stab.seed);
      emit(model, "alpha_pes", ap ? std::optional<double>(ap->value) : std::nullopt, 0.0, seed);
      if (model == ModelKind::kDSRSE) {
        if (dlp_ok) {
          emit(model, "dlp_p", attempt("dlp_p", [&] { return solve_value(build_dlp_p(*inst), SimplexBackend(), "DLP-P"); }), 0.0, seed);
        }
        if (lp_ok) {
          emit(model, "lp_dpes", attempt("lp_dpes", [&] { return solve_value(build_lp_dpes(*inst), SimplexBackend(), "LP-Dpes"); }), 0.0, seed);
        }
        emit(model, "dual_bound_dsrse",
             ap ? std::optional<double>(dual_upper_bound_dsrse(*inst, ap->mu)) : std::nullopt, 0.0, seed);
      } else {
        if (lp_ok) {
          emit(model, "cdlp_p", attempt("cdlp_p", [&] { return solve_value(build_cdlp_p(*inst, config_.box), SimplexBackend(), "CDLP-P"); }), 0.0, seed);
        }
        emit(model, "pstar_bound",
             ap ? attempt("pstar_bound", [&] { return cdsrse_pstar_bound(*inst, ap->value).bound; })
                : std::nullopt,
             0.0, seed);
      }
      const bool small = inst->n() <= config_.dp_limits.max_n && inst->m() <= config_.dp_limits.max_m;
      PolicyOptions options;
      options.static_ratio = config_.static_ratio;
      options.dp_limits = {config_.dp_limits.max_n, config_.dp_limits.max_m};
      for (PolicyKind kind : config_.policies) {
        if (kind == PolicyKind::kDPOptimal && !small) continue;
        const std::uint64_t rollout_seed = derive_seed(
            seed, StreamTag::kRollout, 16 * static_cast<std::uint64_t>(model) + static_cast<std::uint64_t>(kind));
        const auto policy = make_policy(kind, inst, model, options);
        const Estimate est = estimate_policy_value(inst, model, *policy, config_.rollouts, rollout_seed, 1);
        emit(model, policy_metric(kind), est.mean, est.std_error, est.seed);
      }
      if (small) {
        emit(model, "dp_value", attempt("dp_value", [&] {
               return dp_value(*inst, model, config_.dp_limits, Arithmetic::kFloat).value;
             }), 0.0, seed);
      }
    }
    for (ResultRow& row : rows) {
      if (row.value && stab.mean > 0.0) row.normalized = *row.value / stab.mean;
    }
    return rows;
  }

 private:
  void note(const CellJob& job, const std::string& message) const {
    if (log_ == nullptr) return;
    std::lock_guard lock(log_mutex_);
    *log_ << "warning: " << job.size.n << "x" << job.size.m << " " << to_string(job.family)
          << " #" << job.instance << ": " << message << "\n";
  }

  const ExperimentConfig& config_;
  std::ostream* log_;
  std::mutex& log_mutex_;
};

}  // namespace

std::vector<SizeSpec> parse_sizes(const std::string& text) {
  std::vector<SizeSpec> sizes;
  for (const std::string& part : split(text, ',')) {
    const auto x = part.find('x');
    if (x == std::string::npos) throw std::invalid_argument("size '" + part + "' is not NxM");
    try {
      std::size_t used_n = 0;
      std::size_t used_m = 0;
      SizeSpec s{std::stoi(part.substr(0, x), &used_n), std::stoi(part.substr(x + 1), &used_m)};
      if (used_n != x || used_m != part.size() - x - 1 || s.n < 1 || s.m < 2) throw std::invalid_argument(part);
      sizes.push_back(s);
    } catch (const std::logic_error&) {
      throw std::invalid_argument("size '" + part + "' is not NxM");
    }
  }
  if (sizes.empty()) throw std::invalid_argument("no sizes given");
  return sizes;
}

std::string format_sizes(const std::vector<SizeSpec>& sizes) {
  std::string out;
  for (const SizeSpec& s : sizes) {
    if (!out.empty()) out += ",";
    out += std::to_string(s.n) + "x" + std::to_string(s.m);
  }
  return out;
}

void ExperimentConfig::validate() const {
  if (sizes.empty() || instances < 1 || rollouts < 1 || stability_samples < 1 || families.empty() ||
      models.empty()) {
    throw std::invalid_argument("experiment counts and lists must be nonempty");
  }
  for (const SizeSpec& s : sizes) {
    if (s.n < 1 || s.m < 2) throw std::invalid_argument("sizes need n >= 1 and m >= 2");
    const bool sparse = std::any_of(families.begin(), families.end(), [](FamilyTag f) {
      return f == FamilyTag::kSparseBase || f == FamilyTag::kSparseLong;
    });
    if (sparse && s.n < 2) throw std::invalid_argument("sparse families need n >= 2");
  }
}

std::string policy_metric(PolicyKind kind) { return "policy_" + to_string(kind); }

std::uint64_t cell_seed(std::uint64_t master, SizeSpec size, int instance) {
  const std::uint64_t index = (static_cast<std::uint64_t>(size.n) << 40) |
                              (static_cast<std::uint64_t>(size.m) << 20) |
                              static_cast<std::uint64_t>(instance);
  return derive_seed(master, StreamTag::kExperimentCell, index);
}

void sort_rows(std::vector<ResultRow>& rows) {
  std::stable_sort(rows.begin(), rows.end(), [](const ResultRow& x, const ResultRow& y) {
    auto key = [](const ResultRow& r) {
      return std::make_tuple(r.size_n, r.size_m, family_index(r.family), static_cast<int>(r.model),
                             r.instance < 0 ? std::numeric_limits<int>::max() : r.instance, r.metric);
    };
    return key(x) < key(y);
  });
}

std::vector<ResultRow> aggregate_rows(const std::vector<ResultRow>& instance_rows, std::uint64_t seed) {
  std::map<decltype(row_key(instance_rows.front())), std::vector<const ResultRow*>> groups;
  for (const ResultRow& r : instance_rows) {
    if (r.instance >= 0) groups[row_key(r)].push_back(&r);
  }
  std::vector<ResultRow> out;
  for (const auto& [key, members] : groups) {
    std::vector<const ResultRow*> sorted(members);
    std::sort(sorted.begin(), sorted.end(),
              [](const ResultRow* x, const ResultRow* y) { return x->instance < y->instance; });
    ResultRow agg = *sorted.front();
    agg.instance = -1;
    agg.seed = seed;
    std::vector<double> values;
    std::vector<double> normalized;
    for (const ResultRow* r : sorted) {
      if (r->value) values.push_back(*r->value);
      if (r->normalized) normalized.push_back(*r->normalized);
    }
    agg.value = values.empty() ? std::nullopt : std::optional<double>(summarize(values, seed).mean);
    agg.normalized = std::nullopt;
    agg.std_error = 0.0;
    if (!normalized.empty()) {
      const Estimate est = summarize(normalized, seed);
      agg.normalized = est.mean;
      agg.std_error = est.std_error;
    }
    out.push_back(std::move(agg));
  }
  return out;
}

std::vector<ResultRow> run_experiment(const ExperimentConfig& config, std::ostream* log) {
  config.validate();
  std::vector<CellJob> jobs;
  for (const SizeSpec& size : config.sizes) {
    for (FamilyTag family : config.families) {
      for (int k = 0; k < config.instances; ++k) jobs.push_back({size, family, k});
    }
  }
  if (log != nullptr && !config.allow_slow && config.solve_lps) {
    for (const SizeSpec& size : config.sizes) {
      if (size.n >= kSlowN) {
        *log << "note: dlp_p skipped for " << size.n << "x" << size.m << " (pass --allow-slow)\n";
      }
    }
  }
  std::mutex log_mutex;
  const CellRunner runner(config, log, log_mutex);
  std::vector<std::vector<ResultRow>> per_job(jobs.size());
  std::vector<std::exception_ptr> errors(jobs.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      try {
        per_job[i] = runner.run(jobs[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  unsigned workers = config.threads > 0 ? static_cast<unsigned>(config.threads) : std::thread::hardware_concurrency();
  workers = std::clamp<unsigned>(workers, 1u, static_cast<unsigned>(std::max<std::size_t>(1, jobs.size())));
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  std::vector<ResultRow> rows;
  for (auto& cell : per_job) {
    for (auto& r : cell) rows.push_back(std::move(r));
  }
  sort_rows(rows);
  std::vector<ResultRow> aggregates = aggregate_rows(rows, config.seed);
  rows.insert(rows.end(), aggregates.begin(), aggregates.end());
  sort_rows(rows);
  return rows;
}

void write_results_csv(const std::vector<ResultRow>& rows, std::ostream& out) {
  out << kCsvHeader << "\n";
  for (const ResultRow& r : rows) {
    out << r.size_n << "," << r.size_m << "," << to_string(r.family) << "," << to_string(r.model) << ","
        << r.instance << "," << r.metric << "," << (r.value ? format_double(*r.value) : "") << ","
        << (r.normalized ? format_double(*r.normalized) : "") << "," << format_double(r.std_error) << ","
        << r.seed << "\n";
  }
}

std::vector<ResultRow> read_results_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) {
    throw ParseError("results CSV must start with the header '" + std::string(kCsvHeader) + "'");
  }
  std::vector<ResultRow> rows;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 10) throw ParseError("line " + std::to_string(line_no) + ": expected 10 fields");
    try {
      ResultRow r;
      r.size_n = std::stoi(f[0]);
      r.size_m = std::stoi(f[1]);
      r.family = parse_family(f[2]);
      r.model = parse_model(f[3]);
      r.instance = std::stoi(f[4]);
      r.metric = f[5];
      if (!f[6].empty()) r.value = std::stod(f[6]);
      if (!f[7].empty()) r.normalized = std::stod(f[7]);
      r.std_error = std::stod(f[8]);
      r.seed = std::stoull(f[9]);
      rows.push_back(std::move(r));
    } catch (const std::logic_error& e) {
      throw ParseError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return rows;
}

std::vector<std::string> validate_results(const std::vector<ResultRow>& rows) {
  std::vector<std::string> problems;
  auto close = [](double x, double y) { return std::abs(x - y) <= 1e-12 * std::max(1.0, std::abs(y)); };
  auto describe = [](const ResultRow& r) {
    return std::to_string(r.size_n) + "x" + std::to_string(r.size_m) + " " + to_string(r.family) + " " +
           to_string(r.model) + " #" + std::to_string(r.instance) + " " + r.metric;
  };

  std::map<std::tuple<int, int, int, int, int>, double> stab;
  for (const ResultRow& r : rows) {
    if (r.instance >= 0 && r.metric == "expected_stab" && r.value) {
      stab[{r.size_n, r.size_m, family_index(r.family), static_cast<int>(r.model), r.instance}] = *r.value;
    }
  }
  std::vector<ResultRow> instance_rows;
  std::uint64_t seed = 0;
  bool have_aggregates = false;
  for (const ResultRow& r : rows) {
    if (r.instance < 0) {
      seed = r.seed;
      have_aggregates = true;
      continue;
    }
    instance_rows.push_back(r);
    if (!r.value || !r.normalized) continue;
    const auto it = stab.find({r.size_n, r.size_m, family_index(r.family), static_cast<int>(r.model), r.instance});
    if (it == stab.end()) {
      problems.push_back(describe(r) + ": no expected_stab row to normalize by");
    } else if (!close(*r.normalized, *r.value / it->second)) {
      problems.push_back(describe(r) + ": normalized " + format_double(*r.normalized) + " != value / expected_stab " +
                         format_double(*r.value / it->second));
    }
  }
  if (!have_aggregates) return problems;
  std::map<decltype(row_key(rows.front())), ResultRow> expected;
  for (ResultRow& r : aggregate_rows(instance_rows, seed)) expected.emplace(row_key(r), r);
  for (const ResultRow& r : rows) {
    if (r.instance >= 0) continue;
    const auto it = expected.find(row_key(r));
    if (it == expected.end()) {
      problems.push_back(describe(r) + ": aggregate row without instance rows");
      continue;
    }
    const ResultRow& e = it->second;
    const bool ok = r.value.has_value() == e.value.has_value() && r.normalized.has_value() == e.normalized.has_value() &&
                    (!r.value || close(*r.value, *e.value)) && (!r.normalized || close(*r.normalized, *e.normalized)) &&
                    close(r.std_error, e.std_error);
    if (!ok) problems.push_back(describe(r) + ": aggregate does not match its instance rows");
    expected.erase(it);
  }
  for (const auto& [key, r] : expected) problems.push_back(describe(r) + ": aggregate row missing");
  return problems;
}

}  // namespace rsched
