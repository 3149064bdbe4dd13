#include "rsched/montecarlo.h"

#include <algorithm>
#include <cmath>
#include <exception>
#include <stdexcept>
#include <thread>

#include "rsched/relax.h"

namespace rsched {
namespace {

int worker_count(int threads, long jobs) {
  long workers = threads > 0 ? threads : static_cast<long>(std::thread::hardware_concurrency());
  workers = std::clamp(workers, 1L, std::max(1L, jobs));
  return static_cast<int>(workers);
}

// Fills values[i] = f(i) for every index, striding indices over workers.
template <class F>
void parallel_fill(std::vector<double>& values, int threads, F f) {
  const long n = static_cast<long>(values.size());
  const int workers = worker_count(threads, n);
  if (workers == 1) {
    for (long i = 0; i < n; ++i) values[static_cast<std::size_t>(i)] = f(i);
    return;
  }
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (long i = w; i < n; i += workers) values[static_cast<std::size_t>(i)] = f(i);
      } catch (...) {
        errors[static_cast<std::size_t>(w)] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace

Estimate summarize(const std::vector<double>& values, std::uint64_t seed) {
  Estimate est;
  est.seed = seed;
  est.n_samples = static_cast<long>(values.size());
  if (values.empty()) return est;
  double sum = 0.0;
  for (double v : values) sum += v;
  est.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - est.mean) * (v - est.mean);
    const double var = ss / static_cast<double>(values.size() - 1);
    est.std_error = std::sqrt(var / static_cast<double>(values.size()));
  }
  return est;
}

Estimate estimate_policy_value(std::shared_ptr<const Instance> instance, ModelKind model,
                               const Policy& policy, long n_rollouts, std::uint64_t seed,
                               int threads) {
  if (n_rollouts < 1) throw std::invalid_argument("need at least one rollout");
  const auto context = std::make_shared<const InstanceContext>(std::move(instance));
  std::vector<double> values(static_cast<std::size_t>(n_rollouts));
  parallel_fill(values, threads, [&](long r) {
    Rng rng = Rng::stream(seed, StreamTag::kRollout, static_cast<std::uint64_t>(r));
    return run_episode(context, model, policy, rng, false).total_weight;
  });
  return summarize(values, seed);
}

Estimate estimate_expected_stability(const Instance& instance, long n_samples, std::uint64_t seed,
                                     int threads) {
  if (n_samples < 1) throw std::invalid_argument("need at least one sample");
  std::vector<double> weights;
  for (const TaskSpec& task : instance.tasks()) weights.push_back(task.weight);
  std::vector<double> values(static_cast<std::size_t>(n_samples));
  parallel_fill(values, threads, [&](long r) {
    Rng rng = Rng::stream(seed, StreamTag::kStability, static_cast<std::uint64_t>(r));
    std::vector<Interval> realized;
    realized.reserve(instance.tasks().size());
    for (const TaskSpec& task : instance.tasks()) {
      const auto [s, e] = sample_interval(task.law, rng);
      realized.push_back({s, e});
    }
    return wis_value(realized, weights);
  });
  return summarize(values, seed);
}

}  // namespace rsched
