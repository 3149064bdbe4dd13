#include "rsched/oracle.h"

#include <algorithm>
#include <bit>
#include <functional>
#include <unordered_map>

#include "rsched/errors.h"

namespace rsched {
namespace {

std::uint64_t interval_mask(Slot lo, Slot hi) {
  const std::uint64_t upto_hi = hi >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << hi) - 1;
  const std::uint64_t below_lo = (std::uint64_t{1} << (lo - 1)) - 1;
  return upto_hi & ~below_lo;
}

struct StateKeyHash {
  std::size_t operator()(const StateKey& key) const {
    std::uint64_t h = key.occupied * 0x9E3779B97F4A7C15ULL;
    h ^= (static_cast<std::uint64_t>(key.alive) + 0x632BE59BD9B4E019ULL) + (h << 6) + (h >> 2);
    return static_cast<std::size_t>(h);
  }
};

void check_limits(const Instance& instance, OracleLimits limits) {
  if (instance.n() > limits.max_n || instance.m() > limits.max_m) {
    throw CapacityError("exact oracle limited to n <= " + std::to_string(limits.max_n) +
                        " and m <= " + std::to_string(limits.max_m) + " (got n = " +
                        std::to_string(instance.n()) + ", m = " + std::to_string(instance.m()) +
                        ")");
  }
  if (instance.n() > 31 || instance.m() > 64) {
    throw CapacityError("exact oracle state key supports n <= 31 and m <= 64");
  }
}

bool use_exact(const Instance& instance, Arithmetic arithmetic) {
  switch (arithmetic) {
    case Arithmetic::kExact:
      if (!instance.has_exact()) {
        throw InvalidInstanceError("exact arithmetic requested for an instance without exact data");
      }
      return true;
    case Arithmetic::kFloat:
      return false;
    case Arithmetic::kAuto:
      break;
  }
  return instance.has_exact();
}

template <class P>
bool better(const P& candidate, const P& incumbent) {
  if constexpr (std::is_same_v<P, double>) {
    return candidate > incumbent + 1e-12 * std::max(1.0, std::abs(incumbent));
  } else {
    return candidate > incumbent;
  }
}

// Memoized Bellman recursion over (alive mask, occupied mask).
template <class P>
class Bellman {
 public:
  using Law = BasicJointPMF<P>;
  // Chooses the action in a state; nullopt stops. Unset means maximize.
  using Chooser = std::function<std::optional<TaskId>(StateKey)>;

  struct Entry {
    P value;
    std::optional<TaskId> action;
  };

  Bellman(const Instance& instance, ModelKind model, Chooser chooser = {})
      : model_(model), m_(instance.m()), chooser_(std::move(chooser)) {
    if constexpr (std::is_same_v<P, Rational>) {
      for (const auto& task : instance.exact_tasks()) {
        weights_.push_back(task.weight);
        laws_.push_back(task.law);
      }
    } else {
      for (const auto& task : instance.tasks()) {
        weights_.push_back(task.weight);
        laws_.push_back(task.law);
      }
    }
    for (const auto& task : instance.tasks()) {
      footprints_.push_back(footprint(task, m_).to_mask());
    }
  }

  std::uint32_t full_mask() const {
    const auto n = static_cast<std::uint32_t>(weights_.size());
    return n == 0 ? 0u : (n >= 32 ? ~0u : (1u << n) - 1u);
  }

  const Entry& solve(StateKey key) {
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    Entry entry{P(0), std::nullopt};
    if (key.alive != 0) {
      if (chooser_) {
        entry.action = chooser_(key);
        if (entry.action) {
          if (!((key.alive >> (*entry.action - 1)) & 1u)) {
            throw IllegalActionError("policy chose task " + std::to_string(*entry.action) +
                                     " which is not alive");
          }
          entry.value = action_value(key, *entry.action);
        }
      } else {
        for (TaskId i = 1; i <= static_cast<TaskId>(weights_.size()); ++i) {
          if (!((key.alive >> (i - 1)) & 1u)) continue;
          P v = action_value(key, i);
          if (!entry.action || better(v, entry.value)) {
            entry.value = std::move(v);
            entry.action = i;
          }
        }
      }
    }
    return memo_.emplace(key, std::move(entry)).first->second;
  }

  const std::unordered_map<StateKey, Entry, StateKeyHash>& memo() const { return memo_; }

  // Current law of alive task j at occupied mask `occupied`.
  std::optional<Law> current_law(TaskId j, std::uint64_t occupied) const {
    const Law& law = laws_[static_cast<std::size_t>(j - 1)];
    if (model_ == ModelKind::kCDSRSE || occupied == 0) return law;
    std::vector<typename Law::Entry> kept;
    P total = 0;
    bool dropped = false;
    for (const auto& e : law.entries()) {
      if (interval_mask(e.start, e.end) & occupied) {
        dropped = true;
        continue;
      }
      total += e.prob;
      kept.push_back(e);
    }
    if (!dropped) return law;
    if (kept.empty()) return std::nullopt;
    return Law::renormalized(std::move(kept), total);
  }

  // One step of the transition: calls visit(next_key, probability, s, e)
  // for every (outcome, survivor set) branch with positive probability.
  template <class Visit>
  void for_each_branch(StateKey key, TaskId i, Visit&& visit) const {
    const std::uint32_t others_mask = key.alive & ~(1u << (i - 1));
    const auto law_i = current_law(i, key.occupied);
    if (!law_i) throw IllegalActionError("alive task has no feasible outcome");

    std::vector<TaskId> others;
    std::vector<Law> other_laws;
    for (TaskId j = 1; j <= static_cast<TaskId>(weights_.size()); ++j) {
      if (!((others_mask >> (j - 1)) & 1u)) continue;
      others.push_back(j);
      if (model_ == ModelKind::kDSRSE) {
        auto law_j = current_law(j, key.occupied);
        other_laws.push_back(law_j ? std::move(*law_j) : Law());
      }
    }

    for (const auto& outcome : law_i->entries()) {
      const std::uint64_t placed = interval_mask(outcome.start, outcome.end);
      const std::uint64_t occupied = key.occupied | placed;
      if (model_ == ModelKind::kCDSRSE) {
        std::uint32_t survivors = 0;
        for (TaskId j : others) {
          if (!(footprints_[static_cast<std::size_t>(j - 1)] & placed)) survivors |= 1u << (j - 1);
        }
        visit(StateKey{survivors, occupied}, outcome.prob, outcome.start, outcome.end);
        continue;
      }
      // DSRSE: independent deletion coins; certain outcomes do not branch.
      std::uint32_t certain = 0;
      std::vector<TaskId> uncertain;
      std::vector<P> conflict;
      for (std::size_t idx = 0; idx < others.size(); ++idx) {
        const Law& law_j = other_laws[idx];
        if (law_j.empty()) continue;
        // Classified by which outcomes meet the interval, so that rounding
        // never opens a branch whose conditioned law would be empty.
        P p = 0;
        bool meets = false;
        bool avoids = false;
        for (const auto& e : law_j.entries()) {
          if (e.start <= outcome.end && outcome.start <= e.end) {
            meets = true;
            p += e.prob;
          } else {
            avoids = true;
          }
        }
        if (!meets) {
          certain |= 1u << (others[idx] - 1);
        } else if (avoids) {
          uncertain.push_back(others[idx]);
          conflict.push_back(std::move(p));
        }
      }
      const std::size_t k = uncertain.size();
      for (std::uint32_t pattern = 0; pattern < (1u << k); ++pattern) {
        P prob = outcome.prob;
        std::uint32_t survivors = certain;
        for (std::size_t b = 0; b < k; ++b) {
          if ((pattern >> b) & 1u) {
            survivors |= 1u << (uncertain[b] - 1);
            prob *= P(1) - conflict[b];
          } else {
            prob *= conflict[b];
          }
        }
        visit(StateKey{survivors, occupied}, prob, outcome.start, outcome.end);
      }
    }
  }

  P action_value(StateKey key, TaskId i) {
    P total = 0;
    for_each_branch(key, i, [&](StateKey next, const P& prob, Slot, Slot) {
      total += prob * solve(next).value;
    });
    return weights_[static_cast<std::size_t>(i - 1)] + total;
  }

  int m() const { return m_; }

 private:
  ModelKind model_;
  int m_;
  Chooser chooser_;
  std::vector<P> weights_;
  std::vector<Law> laws_;
  std::vector<std::uint64_t> footprints_;
  std::unordered_map<StateKey, Entry, StateKeyHash> memo_;
};

std::shared_ptr<const InstanceContext> make_context(std::shared_ptr<const Instance> instance) {
  return std::make_shared<const InstanceContext>(std::move(instance));
}

// SimState equivalent to a Bellman state key, for querying Policy objects.
SimState rebuild_state(const std::shared_ptr<const InstanceContext>& context, ModelKind model,
                       StateKey key) {
  const Instance& instance = *context->instance;
  SimState state;
  state.context = context;
  state.model = model;
  state.occupied = SlotSet::from_mask(key.occupied, instance.m());
  for (const TaskSpec& task : instance.tasks()) {
    if (!((key.alive >> (task.id - 1)) & 1u)) continue;
    if (model == ModelKind::kDSRSE) {
      auto law = condition_on_avoid(task.law, state.occupied);
      if (law) state.alive.emplace(task.id, std::move(*law));
    } else {
      state.alive.emplace(task.id, task.law);
    }
  }
  state.stage = instance.n() - std::popcount(key.alive);
  return state;
}

typename Bellman<double>::Chooser policy_chooser(const std::shared_ptr<const InstanceContext>& context,
                                                 ModelKind model, const Policy& policy) {
  if (!policy.is_deterministic()) {
    throw UnsupportedPolicyError("policy '" + policy.name() +
                                 "' is stochastic; exact evaluation needs a deterministic policy");
  }
  return [context, model, &policy](StateKey key) -> std::optional<TaskId> {
    Rng unused(0);
    const SimState state = rebuild_state(context, model, key);
    if (state.alive.empty()) return std::nullopt;
    return policy.choose(state, unused);
  };
}

template <class P>
void record_results(Bellman<P>& bellman, StateKey root, OracleValue& out) {
  const auto& root_entry = bellman.solve(root);
  if constexpr (std::is_same_v<P, Rational>) {
    out.exact = true;
    out.exact_value = root_entry.value;
    out.value = root_entry.value.get_d();
  } else {
    out.value = root_entry.value;
  }
  for (const auto& [key, entry] : bellman.memo()) {
    if (entry.action) out.optimal_action_table.emplace(key, *entry.action);
  }
}

template <class P>
PolicyValue evaluate_policy(const Instance& instance, ModelKind model,
                            typename Bellman<P>::Chooser chooser) {
  Bellman<P> bellman(instance, model, std::move(chooser));
  const auto& root = bellman.solve(StateKey{bellman.full_mask(), 0});
  PolicyValue out;
  if constexpr (std::is_same_v<P, Rational>) {
    out.exact = true;
    out.exact_value = root.value;
    out.value = root.value.get_d();
  } else {
    out.value = root.value;
  }
  return out;
}

template <class P>
void accumulate_occupancy(Bellman<P>& bellman, const typename Bellman<P>::Chooser& chooser,
                          StateKey key, const P& reach, std::vector<P>& scheduled,
                          std::vector<P>& occupied) {
  std::optional<TaskId> action;
  if (key.alive != 0) action = chooser(key);
  if (!action) {
    for (int k = 1; k <= bellman.m(); ++k) {
      if ((key.occupied >> (k - 1)) & 1u) occupied[static_cast<std::size_t>(k - 1)] += reach;
    }
    return;
  }
  scheduled[static_cast<std::size_t>(*action - 1)] += reach;
  bellman.for_each_branch(key, *action, [&](StateKey next, const P& prob, Slot, Slot) {
    accumulate_occupancy(bellman, chooser, next, P(reach * prob), scheduled, occupied);
  });
}

template <class P>
PolicyOccupancy occupancy_for(const Instance& instance, ModelKind model,
                              const typename Bellman<P>::Chooser& chooser) {
  Bellman<P> bellman(instance, model, chooser);
  std::vector<P> scheduled(static_cast<std::size_t>(instance.n()), P(0));
  std::vector<P> occupied(static_cast<std::size_t>(instance.m()), P(0));
  accumulate_occupancy(bellman, chooser, StateKey{bellman.full_mask(), 0}, P(1), scheduled,
                       occupied);
  PolicyOccupancy out;
  for (const auto& v : scheduled) out.scheduled.push_back(to_double(v));
  for (const auto& v : occupied) out.slot_occupied.push_back(to_double(v));
  return out;
}

}  // namespace

StateKey state_key(const SimState& state) {
  StateKey key;
  for (const auto& [id, law] : state.alive) key.alive |= 1u << (id - 1);
  key.occupied = state.occupied.to_mask();
  return key;
}

OracleValue dp_value(const Instance& instance, ModelKind model, OracleLimits limits,
                     Arithmetic arithmetic) {
  check_limits(instance, limits);
  OracleValue out;
  if (use_exact(instance, arithmetic)) {
    Bellman<Rational> bellman(instance, model);
    record_results(bellman, StateKey{bellman.full_mask(), 0}, out);
  } else {
    Bellman<double> bellman(instance, model);
    record_results(bellman, StateKey{bellman.full_mask(), 0}, out);
  }
  return out;
}

PolicyValue policy_value_exact(std::shared_ptr<const Instance> instance, ModelKind model,
                               const Policy& policy, OracleLimits limits, Arithmetic arithmetic) {
  check_limits(*instance, limits);
  const auto context = make_context(instance);
  auto chooser = policy_chooser(context, model, policy);
  if (use_exact(*instance, arithmetic)) {
    return evaluate_policy<Rational>(*instance, model, chooser);
  }
  return evaluate_policy<double>(*instance, model, chooser);
}

PolicyOccupancy policy_occupancy_exact(std::shared_ptr<const Instance> instance, ModelKind model,
                                       const Policy& policy, OracleLimits limits) {
  check_limits(*instance, limits);
  const auto context = make_context(instance);
  auto chooser = policy_chooser(context, model, policy);
  if (instance->has_exact()) return occupancy_for<Rational>(*instance, model, chooser);
  return occupancy_for<double>(*instance, model, chooser);
}

struct OracleTable::Impl {
  Impl(std::shared_ptr<const Instance> inst, ModelKind model)
      : instance(std::move(inst)), bellman(*instance, model) {}
  std::shared_ptr<const Instance> instance;
  Bellman<double> bellman;
};

OracleTable::OracleTable(std::shared_ptr<const Instance> instance, ModelKind model,
                         OracleLimits limits) {
  check_limits(*instance, limits);
  impl_ = std::make_unique<Impl>(std::move(instance), model);
}

OracleTable::~OracleTable() = default;

double OracleTable::value(StateKey key) { return impl_->bellman.solve(key).value; }

std::optional<TaskId> OracleTable::best_action(StateKey key) {
  return impl_->bellman.solve(key).action;
}

double conserv_js_value(std::span<const double> q, std::span<const double> w, double w0,
                        std::span<const int> subset) {
  if (q.size() != w.size()) throw std::invalid_argument("q and w must have equal length");
  std::vector<bool> in_subset(q.size(), false);
  for (int leaf : subset) {
    if (leaf < 1 || static_cast<std::size_t>(leaf) > q.size()) {
      throw std::invalid_argument("subset element out of range");
    }
    in_subset[static_cast<std::size_t>(leaf - 1)] = true;
  }
  double chosen = 0.0;
  double rest = 0.0;
  double survive = 1.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (q[i] < 0.0 || q[i] > 1.0) throw std::invalid_argument("q must lie in [0, 1]");
    if (w[i] < 0.0) throw std::invalid_argument("weights must be nonnegative");
    if (in_subset[i]) {
      chosen += w[i];
      survive *= q[i];
    } else {
      rest += w[i];
    }
  }
  return chosen + (1.0 - survive) * rest + survive * w0;
}

ConservJsOptimum conserv_js_opt(std::span<const double> q, std::span<const double> w, double w0) {
  if (q.size() > 20) throw CapacityError("conserv_js_opt enumerates at most 20 leaves");
  const std::size_t n = q.size();
  ConservJsOptimum best;
  bool have_best = false;
  std::vector<int> subset;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    subset.clear();
    for (std::size_t i = 0; i < n; ++i) {
      if ((mask >> i) & 1u) subset.push_back(static_cast<int>(i + 1));
    }
    const double v = conserv_js_value(q, w, w0, subset);
    const double tol = 1e-12 * std::max(1.0, std::abs(best.value));
    const bool tie = have_best && std::abs(v - best.value) <= tol;
    if (!have_best || v > best.value + tol ||
        (tie && std::lexicographical_compare(subset.begin(), subset.end(), best.subset.begin(),
                                             best.subset.end()))) {
      best.value = v;
      best.subset = subset;
      have_best = true;
    }
  }
  return best;
}

}  // namespace rsched
