#pragma once

// Domain types and probability kernels: slot distributions, joint interval
// laws, tasks, instances and occupancy profiles.
//
// Every probability container is a template over the scalar type `P`, which
// is `double` in the simulation and LP paths and `Rational` in the exact
// oracle. The kernels below are written once for both.

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "rsched/errors.h"
#include "rsched/rational.h"
#include "rsched/slot_set.h"

namespace rsched {

using TaskId = int;

template <class P>
struct ProbTraits;

template <>
struct ProbTraits<double> {
  static constexpr double kSumTolerance = 1e-12;
  static constexpr double kDropBelow = 1e-15;
  static bool negligible(double p) { return p < kDropBelow; }
  static bool is_unit(double total) { return std::abs(total - 1.0) <= kSumTolerance; }
  static bool is_zero(double p) { return p == 0.0; }
};

template <>
struct ProbTraits<Rational> {
  static bool negligible(const Rational& p) { return sgn(p) == 0; }
  static bool is_unit(const Rational& total) { return total == 1; }
  static bool is_zero(const Rational& p) { return sgn(p) == 0; }
};

// Discrete distribution over slots. Entries are sorted by slot, strictly
// increasing, and carry positive probability summing to one.
template <class P>
class BasicSlotPMF {
 public:
  struct Entry {
    Slot slot;
    P prob;
  };

  BasicSlotPMF() = default;

  explicit BasicSlotPMF(std::vector<Entry> entries) {
    std::sort(entries.begin(), entries.end(),
              [](const Entry& x, const Entry& y) { return x.slot < y.slot; });
    P total = 0;
    for (std::size_t i = 0; i < entries.size(); ++i) {
      const Entry& e = entries[i];
      if (e.slot < 1) throw InvalidTaskError("slot " + std::to_string(e.slot) + " is below 1");
      if (i > 0 && entries[i - 1].slot == e.slot) {
        throw InvalidTaskError("duplicate slot " + std::to_string(e.slot) + " in distribution");
      }
      if (e.prob < 0) throw InvalidTaskError("negative probability in distribution");
      total += e.prob;
      if (!ProbTraits<P>::is_zero(e.prob)) entries_.push_back(e);
    }
    if (entries_.empty()) throw InvalidTaskError("distribution has no mass");
    if (!ProbTraits<P>::is_unit(total)) {
      throw InvalidTaskError("distribution probabilities do not sum to 1");
    }
  }

  static BasicSlotPMF point(Slot slot) { return BasicSlotPMF({Entry{slot, P(1)}}); }

  static BasicSlotPMF uniform(Slot lo, Slot hi) {
    if (lo > hi) throw InvalidTaskError("uniform distribution with empty range");
    std::vector<Entry> entries;
    const P mass = P(1) / P(hi - lo + 1);
    for (Slot k = lo; k <= hi; ++k) entries.push_back(Entry{k, mass});
    return BasicSlotPMF(std::move(entries));
  }

  const std::vector<Entry>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }
  std::size_t size() const { return entries_.size(); }
  Slot min_slot() const { return entries_.front().slot; }
  Slot max_slot() const { return entries_.back().slot; }

  P prob(Slot slot) const {
    auto it = std::lower_bound(entries_.begin(), entries_.end(), slot,
                               [](const Entry& e, Slot s) { return e.slot < s; });
    if (it == entries_.end() || it->slot != slot) return P(0);
    return it->prob;
  }

  friend bool operator==(const BasicSlotPMF& lhs, const BasicSlotPMF& rhs) {
    if (lhs.entries_.size() != rhs.entries_.size()) return false;
    for (std::size_t i = 0; i < lhs.entries_.size(); ++i) {
      if (lhs.entries_[i].slot != rhs.entries_[i].slot ||
          !(lhs.entries_[i].prob == rhs.entries_[i].prob)) {
        return false;
      }
    }
    return true;
  }

 private:
  std::vector<Entry> entries_;
};

// Joint law of a task's realized interval [start, end] (start <= end).
// Entries are sorted by (start, end) and carry positive probability.
template <class P>
class BasicJointPMF {
 public:
  struct Entry {
    Slot start;
    Slot end;
    P prob;
  };

  BasicJointPMF() = default;

  explicit BasicJointPMF(std::vector<Entry> entries) : BasicJointPMF(std::move(entries), true) {}

  const std::vector<Entry>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }
  std::size_t size() const { return entries_.size(); }

  P prob(Slot start, Slot end) const {
    for (const Entry& e : entries_) {
      if (e.start == start && e.end == end) return e.prob;
    }
    return P(0);
  }

  Slot min_start() const {
    Slot s = entries_.front().start;
    for (const Entry& e : entries_) s = std::min(s, e.start);
    return s;
  }
  Slot max_end() const {
    Slot s = entries_.front().end;
    for (const Entry& e : entries_) s = std::max(s, e.end);
    return s;
  }

  friend bool operator==(const BasicJointPMF& lhs, const BasicJointPMF& rhs) {
    if (lhs.entries_.size() != rhs.entries_.size()) return false;
    for (std::size_t i = 0; i < lhs.entries_.size(); ++i) {
      const Entry& x = lhs.entries_[i];
      const Entry& y = rhs.entries_[i];
      if (x.start != y.start || x.end != y.end || !(x.prob == y.prob)) return false;
    }
    return true;
  }

  // Renormalizes `entries` (already sorted, masses positive) without the
  // unit-sum check; used by the conditioning kernel.
  static BasicJointPMF renormalized(std::vector<Entry> entries, const P& total) {
    std::vector<Entry> kept;
    kept.reserve(entries.size());
    for (Entry& e : entries) {
      e.prob /= total;
      if (!ProbTraits<P>::negligible(e.prob)) kept.push_back(std::move(e));
    }
    return BasicJointPMF(std::move(kept), false);
  }

 private:
  BasicJointPMF(std::vector<Entry> entries, bool validate) {
    if (!validate) {
      entries_ = std::move(entries);
      return;
    }
    std::sort(entries.begin(), entries.end(), [](const Entry& x, const Entry& y) {
      return x.start != y.start ? x.start < y.start : x.end < y.end;
    });
    P total = 0;
    for (std::size_t i = 0; i < entries.size(); ++i) {
      const Entry& e = entries[i];
      if (e.start < 1 || e.start > e.end) {
        throw InvalidTaskError("joint entry (" + std::to_string(e.start) + "," +
                               std::to_string(e.end) + ") is not an interval");
      }
      if (i > 0 && entries[i - 1].start == e.start && entries[i - 1].end == e.end) {
        throw InvalidTaskError("duplicate joint entry");
      }
      if (e.prob < 0) throw InvalidTaskError("negative probability in joint law");
      total += e.prob;
      if (!ProbTraits<P>::is_zero(e.prob)) entries_.push_back(e);
    }
    if (entries_.empty()) throw InvalidTaskError("joint law has no mass");
    if (!ProbTraits<P>::is_unit(total)) {
      throw InvalidTaskError("joint probabilities do not sum to 1");
    }
  }

  std::vector<Entry> entries_;
};

using SlotPMF = BasicSlotPMF<double>;
using ExactSlotPMF = BasicSlotPMF<Rational>;
using JointIntervalPMF = BasicJointPMF<double>;
using ExactJointIntervalPMF = BasicJointPMF<Rational>;

// Product law of independent start and end marginals.
template <class P>
BasicJointPMF<P> joint_from_marginals(const BasicSlotPMF<P>& start, const BasicSlotPMF<P>& end) {
  if (start.empty() || end.empty()) throw InvalidTaskError("empty marginal");
  if (start.max_slot() > end.min_slot()) {
    throw InvalidTaskError("latest start " + std::to_string(start.max_slot()) +
                           " exceeds earliest end " + std::to_string(end.min_slot()));
  }
  std::vector<typename BasicJointPMF<P>::Entry> entries;
  entries.reserve(start.size() * end.size());
  for (const auto& s : start.entries()) {
    for (const auto& e : end.entries()) entries.push_back({s.slot, e.slot, P(s.prob * e.prob)});
  }
  if constexpr (std::is_same_v<P, double>) {
    // Products of valid marginals sum to one up to rounding; skip the check.
    P total = 0;
    for (const auto& e : entries) total += e.prob;
    return BasicJointPMF<P>::renormalized(std::move(entries), total);
  } else {
    return BasicJointPMF<P>(std::move(entries));
  }
}

// Start and end marginals of a joint law.
template <class P>
std::pair<BasicSlotPMF<P>, BasicSlotPMF<P>> marginals(const BasicJointPMF<P>& joint) {
  std::map<Slot, P> start;
  std::map<Slot, P> end;
  for (const auto& e : joint.entries()) {
    start[e.start] += e.prob;
    end[e.end] += e.prob;
  }
  auto to_pmf = [](const std::map<Slot, P>& mass) {
    std::vector<typename BasicSlotPMF<P>::Entry> entries;
    P total = 0;
    for (const auto& [slot, p] : mass) total += p;
    for (const auto& [slot, p] : mass) entries.push_back({slot, P(p / total)});
    return BasicSlotPMF<P>(std::move(entries));
  };
  return {to_pmf(start), to_pmf(end)};
}

// Probability that the realized interval meets [lo, hi].
template <class P>
P conflict_probability(const BasicJointPMF<P>& joint, Slot lo, Slot hi) {
  P total = 0;
  for (const auto& e : joint.entries()) {
    if (e.start <= hi && lo <= e.end) total += e.prob;
  }
  return total;
}

// Probability that the realized interval avoids [lo, hi].
template <class P>
P avoid_probability(const BasicJointPMF<P>& joint, Slot lo, Slot hi) {
  P total = 0;
  for (const auto& e : joint.entries()) {
    if (!(e.start <= hi && lo <= e.end)) total += e.prob;
  }
  return total;
}

// Law conditioned on avoiding every occupied slot, or nullopt when no
// outcome avoids them.
template <class P>
std::optional<BasicJointPMF<P>> condition_on_avoid(const BasicJointPMF<P>& joint,
                                                   const SlotSet& occupied) {
  if (occupied.empty()) return joint;
  std::vector<typename BasicJointPMF<P>::Entry> kept;
  P total = 0;
  bool dropped = false;
  for (const auto& e : joint.entries()) {
    if (occupied.intersects(e.start, e.end)) {
      dropped = true;
      continue;
    }
    total += e.prob;
    kept.push_back(e);
  }
  if (!dropped) return joint;
  if (kept.empty() || ProbTraits<P>::is_zero(total)) return std::nullopt;
  return BasicJointPMF<P>::renormalized(std::move(kept), total);
}

// Same as above with the occupied set given as one interval.
template <class P>
std::optional<BasicJointPMF<P>> condition_on_avoid(const BasicJointPMF<P>& joint, Slot lo,
                                                   Slot hi) {
  std::vector<typename BasicJointPMF<P>::Entry> kept;
  P total = 0;
  bool dropped = false;
  for (const auto& e : joint.entries()) {
    if (e.start <= hi && lo <= e.end) {
      dropped = true;
      continue;
    }
    total += e.prob;
    kept.push_back(e);
  }
  if (!dropped) return joint;
  if (kept.empty() || ProbTraits<P>::is_zero(total)) return std::nullopt;
  return BasicJointPMF<P>::renormalized(std::move(kept), total);
}

// Expected number of occupied slots, E[end - start + 1].
template <class P>
P expected_length(const BasicJointPMF<P>& joint) {
  P total = 0;
  for (const auto& e : joint.entries()) total += e.prob * P(e.end - e.start + 1);
  return total;
}

// Occupancy probabilities Pr[start <= k <= end] for k = 1..m; element k-1.
template <class P>
std::vector<P> occupancy_row(const BasicJointPMF<P>& joint, int m) {
  std::vector<P> row(static_cast<std::size_t>(m), P(0));
  for (const auto& e : joint.entries()) {
    for (Slot k = e.start; k <= e.end && k <= m; ++k) row[static_cast<std::size_t>(k - 1)] += e.prob;
  }
  return row;
}

// A task: weight, start/end marginals and the joint law of its interval.
// Tasks built from marginals carry the product law and satisfy b <= c. Tasks
// built from an explicit law (random single-slot positions, star fixtures)
// carry the law as given; their marginals are derived from it.
template <class P>
struct BasicTaskSpec {
  TaskId id = 0;
  P weight = 0;
  BasicSlotPMF<P> start;
  BasicSlotPMF<P> end;
  BasicJointPMF<P> law;
  bool explicit_law = false;

  Slot a() const { return start.min_slot(); }
  Slot b() const { return start.max_slot(); }
  Slot c() const { return end.min_slot(); }
  Slot d() const { return end.max_slot(); }
};

using TaskSpec = BasicTaskSpec<double>;
using ExactTaskSpec = BasicTaskSpec<Rational>;

template <class P>
BasicTaskSpec<P> make_task(TaskId id, P weight, BasicSlotPMF<P> start, BasicSlotPMF<P> end) {
  if (weight < 0) throw InvalidTaskError("task " + std::to_string(id) + " has negative weight");
  BasicTaskSpec<P> task;
  task.id = id;
  task.weight = std::move(weight);
  task.law = joint_from_marginals(start, end);
  task.start = std::move(start);
  task.end = std::move(end);
  return task;
}

template <class P>
BasicTaskSpec<P> make_task_from_law(TaskId id, P weight, BasicJointPMF<P> law) {
  if (weight < 0) throw InvalidTaskError("task " + std::to_string(id) + " has negative weight");
  BasicTaskSpec<P> task;
  task.id = id;
  task.weight = std::move(weight);
  auto [start, end] = marginals(law);
  task.start = std::move(start);
  task.end = std::move(end);
  task.law = std::move(law);
  task.explicit_law = true;
  return task;
}

// Full problem input: m slots and tasks with ids 1..n.
//
// The floating-point tasks are always present. An exact copy is kept when
// every distribution sums to one exactly in rational arithmetic; the exact
// oracle uses it.
class Instance {
 public:
  Instance() = default;
  Instance(int m, std::vector<TaskSpec> tasks);
  Instance(int m, std::vector<ExactTaskSpec> tasks);

  int m() const { return m_; }
  int n() const { return static_cast<int>(tasks_.size()); }
  const std::vector<TaskSpec>& tasks() const { return tasks_; }
  const TaskSpec& task(TaskId id) const { return tasks_.at(static_cast<std::size_t>(id - 1)); }

  bool has_exact() const { return exact_.has_value(); }
  const std::vector<ExactTaskSpec>& exact_tasks() const;

  // True when every task is a product law with b <= c.
  bool all_product_laws() const;

  double total_weight() const;

  std::map<std::string, std::string>& metadata() { return metadata_; }
  const std::map<std::string, std::string>& metadata() const { return metadata_; }

  friend bool operator==(const Instance& lhs, const Instance& rhs);

 private:
  void validate() const;

  int m_ = 0;
  std::vector<TaskSpec> tasks_;
  std::optional<std::vector<ExactTaskSpec>> exact_;
  std::map<std::string, std::string> metadata_;
};

// Floating copy of an exact task.
TaskSpec to_double_task(const ExactTaskSpec& task);

// Exact copy of a floating task when its probabilities sum to one exactly.
std::optional<ExactTaskSpec> to_exact_task(const TaskSpec& task);

template <class P>
bool operator==(const BasicTaskSpec<P>& lhs, const BasicTaskSpec<P>& rhs) {
  return lhs.id == rhs.id && lhs.weight == rhs.weight && lhs.explicit_law == rhs.explicit_law &&
         lhs.start == rhs.start && lhs.end == rhs.end && lhs.law == rhs.law;
}

// Dense n x m matrices of start, end and occupancy probabilities.
class OccupancyProfile {
 public:
  OccupancyProfile() = default;
  OccupancyProfile(int n, int m)
      : n_(n), m_(m), ps_(size(), 0.0), pe_(size(), 0.0), po_(size(), 0.0) {}

  int n() const { return n_; }
  int m() const { return m_; }

  double start(TaskId i, Slot k) const { return ps_[index(i, k)]; }
  double end(TaskId i, Slot k) const { return pe_[index(i, k)]; }
  double occ(TaskId i, Slot k) const { return po_[index(i, k)]; }

  double& start(TaskId i, Slot k) { return ps_[index(i, k)]; }
  double& end(TaskId i, Slot k) { return pe_[index(i, k)]; }
  double& occ(TaskId i, Slot k) { return po_[index(i, k)]; }

 private:
  std::size_t size() const { return static_cast<std::size_t>(n_) * static_cast<std::size_t>(m_); }
  std::size_t index(TaskId i, Slot k) const {
    return static_cast<std::size_t>(i - 1) * static_cast<std::size_t>(m_) +
           static_cast<std::size_t>(k - 1);
  }

  int n_ = 0;
  int m_ = 0;
  std::vector<double> ps_;
  std::vector<double> pe_;
  std::vector<double> po_;
};

OccupancyProfile occupancy_profile(const Instance& instance);

// Slots where the task's occupancy probability is positive. Equals the span
// [a, d] for every product-law task.
SlotSet footprint(const TaskSpec& task, int m);

}  // namespace rsched
