#pragma once

// Seeded Monte Carlo estimates of policy values and of the expected
// stability number.

#include <cstdint>
#include <memory>
#include <vector>

#include "rsched/dynamics.h"

namespace rsched {

struct Estimate {
  double mean = 0.0;
  double std_error = 0.0;  // unbiased sample variance, divided by n, square-rooted
  long n_samples = 0;
  std::uint64_t seed = 0;
};

// Sample mean and standard error of `values`, summed in index order.
Estimate summarize(const std::vector<double>& values, std::uint64_t seed);

// Rollout r uses Rng::stream(seed, kRollout, r). `threads` <= 0 picks the
// hardware concurrency; results do not depend on it.
Estimate estimate_policy_value(std::shared_ptr<const Instance> instance, ModelKind model,
                               const Policy& policy, long n_rollouts, std::uint64_t seed,
                               int threads = 1);

// Sample r draws every task's interval from its initial law with
// Rng::stream(seed, kStability, r) and solves interval scheduling on the
// realization.
Estimate estimate_expected_stability(const Instance& instance, long n_samples, std::uint64_t seed,
                                     int threads = 1);

}  // namespace rsched
