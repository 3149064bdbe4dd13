#include "rsched/dynamics.h"

#include <stdexcept>

namespace rsched {

std::string to_string(ModelKind model) {
  return model == ModelKind::kDSRSE ? "dsrse" : "cdsrse";
}

ModelKind parse_model(const std::string& text) {
  if (text == "dsrse" || text == "DSRSE") return ModelKind::kDSRSE;
  if (text == "cdsrse" || text == "CDSRSE") return ModelKind::kCDSRSE;
  throw std::invalid_argument("unknown model '" + text + "'");
}

InstanceContext::InstanceContext(std::shared_ptr<const Instance> inst)
    : instance(std::move(inst)) {
  footprints.reserve(instance->tasks().size());
  for (const TaskSpec& task : instance->tasks()) {
    footprints.push_back(footprint(task, instance->m()));
  }
}

SimState initial_state(std::shared_ptr<const InstanceContext> context, ModelKind model) {
  SimState state;
  state.model = model;
  state.occupied = SlotSet(context->instance->m());
  for (const TaskSpec& task : context->instance->tasks()) state.alive.emplace(task.id, task.law);
  state.context = std::move(context);
  return state;
}

SimState initial_state(std::shared_ptr<const Instance> instance, ModelKind model) {
  return initial_state(std::make_shared<const InstanceContext>(std::move(instance)), model);
}

std::pair<Slot, Slot> sample_interval(const JointIntervalPMF& law, Rng& rng) {
  const double u = rng.uniform01();
  double cumulative = 0.0;
  for (const auto& e : law.entries()) {
    cumulative += e.prob;
    if (u < cumulative) return {e.start, e.end};
  }
  const auto& last = law.entries().back();
  return {last.start, last.end};
}

TraceRecord commit_in_place(SimState& state, TaskId task, Rng& rng) {
  auto it = state.alive.find(task);
  if (it == state.alive.end()) {
    throw IllegalActionError("task " + std::to_string(task) + " is not alive");
  }
  const auto [s, e] = sample_interval(it->second, rng);
  state.alive.erase(it);

  TraceRecord record{state.stage + 1, task, s, e, {}};
  state.occupied.insert(s, e);
  state.committed.push_back({task, s, e});
  state.total_weight += state.instance().task(task).weight;
  state.stage += 1;

  for (auto j = state.alive.begin(); j != state.alive.end();) {
    bool remove = false;
    if (state.model == ModelKind::kDSRSE) {
      const double p = conflict_probability(j->second, s, e);
      const bool coin = rng.uniform01() < p;
      if (coin) {
        remove = true;
      } else if (p > 0.0) {
        auto conditioned = condition_on_avoid(j->second, s, e);
        if (conditioned) {
          j->second = std::move(*conditioned);
        } else {
          remove = true;
        }
      }
    } else {
      remove = state.context->footprints[static_cast<std::size_t>(j->first - 1)].intersects(s, e);
    }
    if (remove) {
      record.deleted.push_back(j->first);
      j = state.alive.erase(j);
    } else {
      ++j;
    }
  }
  return record;
}

std::pair<SimState, TraceRecord> commit(SimState state, TaskId task, Rng& rng) {
  TraceRecord record = commit_in_place(state, task, rng);
  return {std::move(state), std::move(record)};
}

EpisodeResult run_episode(std::shared_ptr<const InstanceContext> context, ModelKind model,
                          const Policy& policy, Rng& rng, bool record_trace) {
  SimState state = initial_state(std::move(context), model);
  EpisodeResult result;
  while (!state.alive.empty()) {
    const std::optional<TaskId> choice = policy.choose(state, rng);
    if (!choice) break;
    TraceRecord record = commit_in_place(state, *choice, rng);
    if (record_trace) result.trace.push_back(std::move(record));
  }
  result.total_weight = state.total_weight;
  return result;
}

EpisodeResult run_episode(std::shared_ptr<const Instance> instance, ModelKind model,
                          const Policy& policy, Rng& rng, bool record_trace) {
  return run_episode(std::make_shared<const InstanceContext>(std::move(instance)), model, policy,
                     rng, record_trace);
}

}  // namespace rsched
