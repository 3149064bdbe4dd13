#pragma once

// Stochastic transition engines for DSRSE and CDSRSE and the episode driver.

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rsched/core.h"
#include "rsched/random.h"

namespace rsched {

enum class ModelKind { kDSRSE, kCDSRSE };

std::string to_string(ModelKind model);
ModelKind parse_model(const std::string& text);

struct CommittedInterval {
  TaskId task;
  Slot start;
  Slot end;
};

// Per-instance data shared by every state of an episode: the initial laws and
// the slot footprint used by the conservative deletion rule.
struct InstanceContext {
  explicit InstanceContext(std::shared_ptr<const Instance> inst);

  std::shared_ptr<const Instance> instance;
  std::vector<SlotSet> footprints;  // index id-1
};

struct SimState {
  std::shared_ptr<const InstanceContext> context;
  ModelKind model = ModelKind::kDSRSE;
  SlotSet occupied;
  // Current law of every alive task. Conditioned on the occupied slots in
  // DSRSE; always the initial law in CDSRSE.
  std::map<TaskId, JointIntervalPMF> alive;
  std::vector<CommittedInterval> committed;
  double total_weight = 0.0;
  int stage = 0;

  const Instance& instance() const { return *context->instance; }
  bool is_alive(TaskId id) const { return alive.count(id) != 0; }
};

struct TraceRecord {
  int stage;
  TaskId task;
  Slot start;
  Slot end;
  std::vector<TaskId> deleted;
};

using EpisodeTrace = std::vector<TraceRecord>;

SimState initial_state(std::shared_ptr<const InstanceContext> context, ModelKind model);
SimState initial_state(std::shared_ptr<const Instance> instance, ModelKind model);

// One draw (start, end) from a joint law, by inversion of a single uniform.
std::pair<Slot, Slot> sample_interval(const JointIntervalPMF& law, Rng& rng);

// Commits `task` in place: draws its interval from the current law, then
// resolves the other alive tasks in ascending id order (one deletion coin per
// task in DSRSE, a deterministic footprint test in CDSRSE).
TraceRecord commit_in_place(SimState& state, TaskId task, Rng& rng);

std::pair<SimState, TraceRecord> commit(SimState state, TaskId task, Rng& rng);

// Interface implemented by every scheduling policy. `choose` returns the
// task to commit next, or nullopt to stop.
class Policy {
 public:
  virtual ~Policy() = default;
  virtual std::optional<TaskId> choose(const SimState& state, Rng& rng) const = 0;
  // Whether `choose` ignores the random stream.
  virtual bool is_deterministic() const { return true; }
  virtual std::string name() const = 0;
};

struct EpisodeResult {
  double total_weight = 0.0;
  EpisodeTrace trace;
};

EpisodeResult run_episode(std::shared_ptr<const InstanceContext> context, ModelKind model,
                          const Policy& policy, Rng& rng, bool record_trace = true);
EpisodeResult run_episode(std::shared_ptr<const Instance> instance, ModelKind model,
                          const Policy& policy, Rng& rng, bool record_trace = true);

}  // namespace rsched
