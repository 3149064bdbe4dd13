#include "rsched/core.h"

#include <numeric>

namespace rsched {
namespace {

template <class P>
void validate_task(const BasicTaskSpec<P>& task, int m) {
  const std::string label = "task " + std::to_string(task.id);
  if (task.start.empty() || task.end.empty() || task.law.empty()) {
    throw InvalidInstanceError(label + " has an empty distribution");
  }
  if (task.d() > m || task.law.max_end() > m) {
    throw InvalidInstanceError(label + " has support beyond slot " + std::to_string(m));
  }
  if (!task.explicit_law && task.b() > task.c()) {
    throw InvalidInstanceError(label + " has latest start after earliest end");
  }
}

ExactSlotPMF exact_pmf(const SlotPMF& pmf) {
  std::vector<ExactSlotPMF::Entry> entries;
  for (const auto& e : pmf.entries()) entries.push_back({e.slot, exact_from_double(e.prob)});
  return ExactSlotPMF(std::move(entries));
}

SlotPMF double_pmf(const ExactSlotPMF& pmf) {
  std::vector<SlotPMF::Entry> entries;
  for (const auto& e : pmf.entries()) entries.push_back({e.slot, e.prob.get_d()});
  return SlotPMF(std::move(entries));
}

}  // namespace

TaskSpec to_double_task(const ExactTaskSpec& task) {
  if (task.explicit_law) {
    std::vector<JointIntervalPMF::Entry> entries;
    for (const auto& e : task.law.entries()) entries.push_back({e.start, e.end, e.prob.get_d()});
    return make_task_from_law(task.id, task.weight.get_d(), JointIntervalPMF(std::move(entries)));
  }
  return make_task(task.id, task.weight.get_d(), double_pmf(task.start), double_pmf(task.end));
}

std::optional<ExactTaskSpec> to_exact_task(const TaskSpec& task) {
  try {
    if (task.explicit_law) {
      std::vector<ExactJointIntervalPMF::Entry> entries;
      for (const auto& e : task.law.entries()) {
        entries.push_back({e.start, e.end, exact_from_double(e.prob)});
      }
      return make_task_from_law(task.id, exact_from_double(task.weight),
                                ExactJointIntervalPMF(std::move(entries)));
    }
    return make_task(task.id, exact_from_double(task.weight), exact_pmf(task.start),
                     exact_pmf(task.end));
  } catch (const InvalidTaskError&) {
    return std::nullopt;
  }
}

Instance::Instance(int m, std::vector<TaskSpec> tasks) : m_(m), tasks_(std::move(tasks)) {
  std::sort(tasks_.begin(), tasks_.end(),
            [](const TaskSpec& x, const TaskSpec& y) { return x.id < y.id; });
  validate();
  std::vector<ExactTaskSpec> exact;
  exact.reserve(tasks_.size());
  for (const TaskSpec& task : tasks_) {
    auto converted = to_exact_task(task);
    if (!converted) return;
    exact.push_back(std::move(*converted));
  }
  exact_ = std::move(exact);
}

Instance::Instance(int m, std::vector<ExactTaskSpec> tasks) : m_(m) {
  std::sort(tasks.begin(), tasks.end(),
            [](const ExactTaskSpec& x, const ExactTaskSpec& y) { return x.id < y.id; });
  tasks_.reserve(tasks.size());
  for (const ExactTaskSpec& task : tasks) tasks_.push_back(to_double_task(task));
  exact_ = std::move(tasks);
  validate();
}

void Instance::validate() const {
  if (m_ < 1 && !tasks_.empty()) throw InvalidInstanceError("instance needs at least one slot");
  for (std::size_t i = 0; i < tasks_.size(); ++i) {
    if (tasks_[i].id != static_cast<TaskId>(i + 1)) {
      throw InvalidInstanceError("task ids must be 1..n without gaps or duplicates");
    }
    validate_task(tasks_[i], m_);
  }
}

const std::vector<ExactTaskSpec>& Instance::exact_tasks() const {
  if (!exact_) throw InvalidInstanceError("instance has no exact representation");
  return *exact_;
}

bool Instance::all_product_laws() const {
  return std::none_of(tasks_.begin(), tasks_.end(),
                      [](const TaskSpec& t) { return t.explicit_law; });
}

double Instance::total_weight() const {
  double total = 0.0;
  for (const TaskSpec& t : tasks_) total += t.weight;
  return total;
}

bool operator==(const Instance& lhs, const Instance& rhs) {
  if (lhs.m_ != rhs.m_ || lhs.tasks_ != rhs.tasks_ || lhs.metadata_ != rhs.metadata_) {
    return false;
  }
  if (lhs.exact_.has_value() != rhs.exact_.has_value()) return false;
  return !lhs.exact_ || *lhs.exact_ == *rhs.exact_;
}

OccupancyProfile occupancy_profile(const Instance& instance) {
  const int m = instance.m();
  OccupancyProfile profile(instance.n(), m);
  for (const TaskSpec& task : instance.tasks()) {
    for (const auto& e : task.start.entries()) profile.start(task.id, e.slot) = e.prob;
    for (const auto& e : task.end.entries()) profile.end(task.id, e.slot) = e.prob;
    if (task.explicit_law) {
      const auto row = occupancy_row(task.law, m);
      for (Slot k = 1; k <= m; ++k) profile.occ(task.id, k) = row[static_cast<std::size_t>(k - 1)];
      continue;
    }
    // Independent start and end: Pr[s <= k] * Pr[e >= k].
    double started = 0.0;
    double not_ended = 1.0;
    for (Slot k = 1; k <= m; ++k) {
      started += profile.start(task.id, k);
      if (k > 1) not_ended -= profile.end(task.id, k - 1);
      double occ = std::clamp(started, 0.0, 1.0) * std::clamp(not_ended, 0.0, 1.0);
      if (k >= task.b() && k <= task.c()) occ = 1.0;
      if (k < task.a() || k > task.d()) occ = 0.0;
      profile.occ(task.id, k) = occ;
    }
  }
  return profile;
}

SlotSet footprint(const TaskSpec& task, int m) {
  SlotSet slots(m);
  if (!task.explicit_law) {
    slots.insert(task.a(), task.d());
    return slots;
  }
  for (const auto& e : task.law.entries()) slots.insert(e.start, e.end);
  return slots;
}

}  // namespace rsched
