#pragma once

// Exact expected values for small instances: the optimal Bellman value,
// fixed-policy values, and the closed form for star instances under the
// conservative model.

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "rsched/dynamics.h"

namespace rsched {

struct OracleLimits {
  int max_n = 6;
  int max_m = 14;
};

enum class Arithmetic {
  kAuto,   // exact when the instance has an exact representation
  kExact,
  kFloat,
};

// Bellman state key: bit (id-1) of `alive`, bit (k-1) of `occupied`.
struct StateKey {
  std::uint32_t alive = 0;
  std::uint64_t occupied = 0;

  friend bool operator==(const StateKey&, const StateKey&) = default;
  friend auto operator<=>(const StateKey&, const StateKey&) = default;
};

StateKey state_key(const SimState& state);

struct OracleValue {
  bool exact = false;
  Rational exact_value;  // valid when `exact`
  double value = 0.0;
  std::map<StateKey, TaskId> optimal_action_table;
};

OracleValue dp_value(const Instance& instance, ModelKind model, OracleLimits limits = {},
                     Arithmetic arithmetic = Arithmetic::kAuto);

struct PolicyValue {
  bool exact = false;
  Rational exact_value;
  double value = 0.0;
};

// Expected total weight of a deterministic policy, by the same recursion as
// dp_value with the maximization replaced by the policy's choice. The policy
// sees a SimState rebuilt from the state key.
PolicyValue policy_value_exact(std::shared_ptr<const Instance> instance, ModelKind model,
                               const Policy& policy, OracleLimits limits = {},
                               Arithmetic arithmetic = Arithmetic::kAuto);

// Probability that each task is ever scheduled (index id-1) and that each
// slot ends up occupied (index k-1) when running `policy` to completion.
struct PolicyOccupancy {
  std::vector<double> scheduled;
  std::vector<double> slot_occupied;
};

PolicyOccupancy policy_occupancy_exact(std::shared_ptr<const Instance> instance, ModelKind model,
                                       const Policy& policy, OracleLimits limits = {});

// Lazily evaluated optimal values and actions in floating point; backs the
// DP policy.
class OracleTable {
 public:
  OracleTable(std::shared_ptr<const Instance> instance, ModelKind model, OracleLimits limits);
  ~OracleTable();
  OracleTable(const OracleTable&) = delete;
  OracleTable& operator=(const OracleTable&) = delete;

  double value(StateKey key);
  // Optimal action, lowest id among ties; nullopt when nothing is alive.
  std::optional<TaskId> best_action(StateKey key);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Star instance value for one choice S of leaves committed before the
// center: sum_{S} w + (1 - prod_S q) sum_{not S} w + prod_S q * w0.
// `q` and `w` are indexed by leaf (0-based here; leaf i is task i+1 of the
// star instance). `subset` lists 1-based leaf numbers.
double conserv_js_value(std::span<const double> q, std::span<const double> w, double w0,
                        std::span<const int> subset);

struct ConservJsOptimum {
  double value = 0.0;
  std::vector<int> subset;  // 1-based leaf numbers, ascending
};

// Brute force over all 2^n subsets; ties go to the lexicographically
// smallest subset. n <= 20.
ConservJsOptimum conserv_js_opt(std::span<const double> q, std::span<const double> w, double w0);

}  // namespace rsched
