#pragma once

#include <cmath>
#include <memory>
#include <vector>

#include "rsched/core.h"
#include "rsched/gen.h"
#include "rsched/lp.h"
#include "rsched/random.h"

namespace rsched::testing {

// m = 3, unit weights; task 1 on [1,2]; task 2 starts uniformly in {2,3}
// and ends at 3.
inline std::shared_ptr<const Instance> example1() {
  std::vector<ExactTaskSpec> tasks;
  tasks.push_back(make_task(1, Rational(1), ExactSlotPMF::point(1), ExactSlotPMF::point(2)));
  tasks.push_back(make_task(2, Rational(1), ExactSlotPMF::uniform(2, 3), ExactSlotPMF::point(3)));
  return std::make_shared<const Instance>(3, std::move(tasks));
}

inline TaskSpec interval_task(TaskId id, double w, Slot lo, Slot hi) {
  return make_task(id, w, SlotPMF::point(lo), SlotPMF::point(hi));
}

// Random instance with n in [1, max_n] and m in [2, max_m].
inline Instance random_small_instance(std::uint64_t seed, int max_n = 5, int max_m = 10) {
  Rng rng = Rng::stream(seed, StreamTag::kFixture, 99);
  const int n = static_cast<int>(rng.uniform_int(1, max_n));
  const int m = static_cast<int>(rng.uniform_int(2, max_m));
  return generate_instance(n, m, seed);
}

// Upper 0.1% point of chi-square with `dof` degrees of freedom
// (Wilson-Hilferty approximation).
inline double chi2_critical(int dof) {
  const double z = 3.0902;
  const double k = dof;
  const double t = 1.0 - 2.0 / (9.0 * k) + z * std::sqrt(2.0 / (9.0 * k));
  return k * t * t * t;
}

inline double chi2_statistic(const std::vector<long>& observed, const std::vector<double>& probs) {
  long total = 0;
  for (long o : observed) total += o;
  double stat = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    const double expected = probs[i] * static_cast<double>(total);
    const double diff = static_cast<double>(observed[i]) - expected;
    stat += diff * diff / expected;
  }
  return stat;
}

// Random LP with at most 8 columns and 8 rows, small integer data, mixed
// senses, relations and bounds.
inline LPModel random_lp(std::uint64_t seed) {
  Rng rng = Rng::stream(seed, StreamTag::kFixture, 3);
  const int n = static_cast<int>(rng.uniform_int(1, 8));
  const int rows = static_cast<int>(rng.uniform_int(1, 8));
  LPModel model(rng.bernoulli(0.5) ? Sense::kMaximize : Sense::kMinimize);
  // Most right-hand sides are built around the integer point x0, so most
  // models are feasible; the rest are drawn blindly.
  std::vector<double> x0;
  for (int j = 0; j < n; ++j) {
    const double lower = rng.bernoulli(0.2) ? -static_cast<double>(rng.uniform_int(0, 3)) : 0.0;
    const double upper = rng.bernoulli(0.6) ? lower + static_cast<double>(rng.uniform_int(0, 5)) : kInf;
    model.add_variable("x" + std::to_string(j), static_cast<double>(rng.uniform_int(-5, 5)), lower, upper);
    const double room = std::isfinite(upper) ? upper - lower : 3.0;
    x0.push_back(lower + static_cast<double>(rng.uniform_int(0, static_cast<std::int64_t>(room))));
  }
  for (int r = 0; r < rows; ++r) {
    std::vector<std::pair<int, double>> coeffs;
    double at_x0 = 0.0;
    for (int j = 0; j < n; ++j) {
      if (!rng.bernoulli(0.7)) continue;
      const double a = static_cast<double>(rng.uniform_int(-5, 5));
      coeffs.push_back({j, a});
      at_x0 += a * x0[static_cast<std::size_t>(j)];
    }
    const auto rel = static_cast<RowRelation>(rng.uniform_int(0, 2));
    double rhs = static_cast<double>(rng.uniform_int(-5, 5));
    if (rng.bernoulli(0.85)) {
      const double slack = static_cast<double>(rng.uniform_int(0, 3));
      if (rel == RowRelation::kLessEqual) {
        rhs = at_x0 + slack;
      } else if (rel == RowRelation::kGreaterEqual) {
        rhs = at_x0 - slack;
      } else {
        rhs = at_x0;
      }
    }
    model.add_row("r" + std::to_string(r), coeffs, rel, rhs);
  }
  return model;
}

}  // namespace rsched::testing
