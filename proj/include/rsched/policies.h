#pragma once

// Greedy heuristics (ratio, net weight) and baseline policies.

#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "rsched/dynamics.h"

namespace rsched {

enum class PolicyKind { kRatio, kWeight, kRandom, kDPOptimal };

std::string to_string(PolicyKind kind);
PolicyKind parse_policy(const std::string& text);

// argmax over alive tasks of weight / expected occupied length. With
// `static_profile` the length comes from the initial law instead of the
// current (conditioned) one. Ties go to the lowest id.
TaskId ratio_choose(const SimState& state, bool static_profile = false);

// argmax over alive i of w_i - sum_{alive j != i} Pr[j deleted | i committed] w_j.
TaskId weight_choose(const SimState& state);

// Net-weight scores for every alive task, in ascending id order.
std::vector<std::pair<TaskId, double>> weight_scores(const SimState& state);

// Pr[j deleted | i committed now] under the state's model.
double deletion_probability(const SimState& state, TaskId i, TaskId j);

TaskId random_choose(const SimState& state, Rng& rng);

class RatioPolicy final : public Policy {
 public:
  explicit RatioPolicy(bool static_profile = false) : static_profile_(static_profile) {}
  std::optional<TaskId> choose(const SimState& state, Rng& rng) const override;
  std::string name() const override { return static_profile_ ? "ratio-static" : "ratio"; }

 private:
  bool static_profile_;
};

class WeightPolicy final : public Policy {
 public:
  std::optional<TaskId> choose(const SimState& state, Rng& rng) const override;
  std::string name() const override { return "weight"; }
};

class RandomPolicy final : public Policy {
 public:
  std::optional<TaskId> choose(const SimState& state, Rng& rng) const override;
  bool is_deterministic() const override { return false; }
  std::string name() const override { return "random"; }
};

// Fixed priority list: commits the first alive task of `order`. Tasks not in
// the list are never chosen; the policy stops when none of them is alive.
class PriorityPolicy final : public Policy {
 public:
  explicit PriorityPolicy(std::vector<TaskId> order) : order_(std::move(order)) {}

  // Highest weight first, ties by lowest id.
  static PriorityPolicy by_weight(const Instance& instance);

  std::optional<TaskId> choose(const SimState& state, Rng& rng) const override;
  std::string name() const override { return "priority"; }

 private:
  std::vector<TaskId> order_;
};

class OracleTable;

// Plays the optimal action of the exact Bellman recursion. The recursion is
// evaluated lazily and memoized across calls.
class DpPolicy final : public Policy {
 public:
  struct Limits {
    int max_n = 6;
    int max_m = 14;
  };

  DpPolicy(std::shared_ptr<const Instance> instance, ModelKind model, Limits limits);
  DpPolicy(std::shared_ptr<const Instance> instance, ModelKind model)
      : DpPolicy(std::move(instance), model, Limits{}) {}
  ~DpPolicy() override;

  std::optional<TaskId> choose(const SimState& state, Rng& rng) const override;
  std::string name() const override { return "dp"; }

 private:
  std::unique_ptr<OracleTable> table_;
  mutable std::mutex mutex_;
};

TaskId dp_choose(const SimState& state, DpPolicy::Limits limits = {});

struct PolicyOptions {
  bool static_ratio = false;
  DpPolicy::Limits dp_limits;
};

std::unique_ptr<Policy> make_policy(PolicyKind kind, std::shared_ptr<const Instance> instance,
                                    ModelKind model, const PolicyOptions& options = {});

}  // namespace rsched
