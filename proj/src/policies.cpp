#include "rsched/policies.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "rsched/oracle.h"

namespace rsched {
namespace {

void require_alive(const SimState& state) {
  if (state.alive.empty()) throw NoActionError("no alive task to choose from");
}

bool improves(double candidate, double incumbent) {
  return candidate > incumbent + 1e-12 * std::max(1.0, std::abs(incumbent));
}

// Dense marginals of a law: start[k], end[k] for k in [0, m+1].
struct DenseMarginals {
  std::vector<double> start;
  std::vector<double> end;
};

DenseMarginals dense_marginals(const JointIntervalPMF& law, int m) {
  DenseMarginals out{std::vector<double>(static_cast<std::size_t>(m) + 2, 0.0),
                     std::vector<double>(static_cast<std::size_t>(m) + 2, 0.0)};
  for (const auto& e : law.entries()) {
    out.start[static_cast<std::size_t>(e.start)] += e.prob;
    out.end[static_cast<std::size_t>(e.end)] += e.prob;
  }
  return out;
}

// For a law of task j: ended[k] = Pr[e_j <= k], not_started[k] = Pr[s_j > k].
struct Tails {
  std::vector<double> ended;
  std::vector<double> not_started;
};

Tails tails(const DenseMarginals& marg) {
  const std::size_t size = marg.start.size();
  Tails out{std::vector<double>(size, 0.0), std::vector<double>(size, 0.0)};
  double cumulative = 0.0;
  for (std::size_t k = 0; k < size; ++k) {
    cumulative += marg.end[k];
    out.ended[k] = cumulative;
  }
  double remaining = 0.0;
  for (std::size_t k = size; k-- > 0;) {
    out.not_started[k] = remaining;
    remaining += marg.start[k];
  }
  return out;
}

// Deletion probability in DSRSE: Pr[j conflicts with [s, e]] is
// 1 - Pr[e_j < s] - Pr[s_j > e], which is separable in (s, e), so its
// expectation only needs the marginals of i's law.
double dsrse_deletion(const DenseMarginals& marg_i, const Tails& tails_j) {
  double avoid = 0.0;
  for (std::size_t k = 1; k + 1 < marg_i.start.size(); ++k) {
    if (marg_i.start[k] != 0.0) avoid += marg_i.start[k] * tails_j.ended[k - 1];
    if (marg_i.end[k] != 0.0) avoid += marg_i.end[k] * tails_j.not_started[k];
  }
  return std::clamp(1.0 - avoid, 0.0, 1.0);
}

// next_slot[x] = smallest footprint slot >= x, or m+1.
std::vector<Slot> next_footprint_slot(const SlotSet& footprint, int m) {
  std::vector<Slot> next(static_cast<std::size_t>(m) + 2, m + 1);
  for (Slot k = m; k >= 1; --k) {
    next[static_cast<std::size_t>(k)] = footprint.contains(k) ? k : next[static_cast<std::size_t>(k) + 1];
  }
  return next;
}

double cdsrse_deletion(const JointIntervalPMF& law_i, const std::vector<Slot>& next_j) {
  double total = 0.0;
  for (const auto& e : law_i.entries()) {
    if (next_j[static_cast<std::size_t>(e.start)] <= e.end) total += e.prob;
  }
  return std::min(total, 1.0);
}

}  // namespace

std::string to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::kRatio:
      return "ratio";
    case PolicyKind::kWeight:
      return "weight";
    case PolicyKind::kRandom:
      return "random";
    case PolicyKind::kDPOptimal:
      return "dp";
  }
  return "unknown";
}

PolicyKind parse_policy(const std::string& text) {
  if (text == "ratio") return PolicyKind::kRatio;
  if (text == "weight") return PolicyKind::kWeight;
  if (text == "random") return PolicyKind::kRandom;
  if (text == "dp") return PolicyKind::kDPOptimal;
  throw std::invalid_argument("unknown policy '" + text + "'");
}

TaskId ratio_choose(const SimState& state, bool static_profile) {
  require_alive(state);
  const Instance& instance = state.instance();
  TaskId best = 0;
  double best_score = -std::numeric_limits<double>::infinity();
  for (const auto& [id, law] : state.alive) {
    const double length =
        expected_length(static_profile ? instance.task(id).law : law);
    const double score = instance.task(id).weight / length;
    if (best == 0 || improves(score, best_score)) {
      best = id;
      best_score = score;
    }
  }
  return best;
}

double deletion_probability(const SimState& state, TaskId i, TaskId j) {
  const auto law_i = state.alive.find(i);
  const auto law_j = state.alive.find(j);
  if (i == j || law_i == state.alive.end() || law_j == state.alive.end()) {
    throw IllegalActionError("deletion probability needs two distinct alive tasks");
  }
  const int m = state.instance().m();
  if (state.model == ModelKind::kDSRSE) {
    return dsrse_deletion(dense_marginals(law_i->second, m),
                          tails(dense_marginals(law_j->second, m)));
  }
  return cdsrse_deletion(law_i->second,
                         next_footprint_slot(state.context->footprints[static_cast<std::size_t>(j - 1)], m));
}

std::vector<std::pair<TaskId, double>> weight_scores(const SimState& state) {
  const Instance& instance = state.instance();
  const int m = instance.m();
  std::vector<TaskId> ids;
  for (const auto& [id, law] : state.alive) ids.push_back(id);

  std::vector<DenseMarginals> marg;
  std::vector<Tails> tail;
  std::vector<std::vector<Slot>> next;
  for (TaskId id : ids) {
    if (state.model == ModelKind::kDSRSE) {
      marg.push_back(dense_marginals(state.alive.at(id), m));
      tail.push_back(tails(marg.back()));
    } else {
      next.push_back(next_footprint_slot(state.context->footprints[static_cast<std::size_t>(id - 1)], m));
    }
  }

  std::vector<std::pair<TaskId, double>> scores;
  for (std::size_t a = 0; a < ids.size(); ++a) {
    double lost = 0.0;
    for (std::size_t b = 0; b < ids.size(); ++b) {
      if (a == b) continue;
      const double w_j = instance.task(ids[b]).weight;
      if (w_j == 0.0) continue;
      const double p = state.model == ModelKind::kDSRSE
                           ? dsrse_deletion(marg[a], tail[b])
                           : cdsrse_deletion(state.alive.at(ids[a]), next[b]);
      lost += p * w_j;
    }
    scores.emplace_back(ids[a], instance.task(ids[a]).weight - lost);
  }
  return scores;
}

TaskId weight_choose(const SimState& state) {
  require_alive(state);
  TaskId best = 0;
  double best_score = 0.0;
  for (const auto& [id, score] : weight_scores(state)) {
    if (best == 0 || improves(score, best_score)) {
      best = id;
      best_score = score;
    }
  }
  return best;
}

TaskId random_choose(const SimState& state, Rng& rng) {
  require_alive(state);
  const auto pick = rng.uniform_int(0, static_cast<std::int64_t>(state.alive.size()) - 1);
  return std::next(state.alive.begin(), static_cast<std::ptrdiff_t>(pick))->first;
}

std::optional<TaskId> RatioPolicy::choose(const SimState& state, Rng&) const {
  if (state.alive.empty()) return std::nullopt;
  return ratio_choose(state, static_profile_);
}

std::optional<TaskId> WeightPolicy::choose(const SimState& state, Rng&) const {
  if (state.alive.empty()) return std::nullopt;
  return weight_choose(state);
}

std::optional<TaskId> RandomPolicy::choose(const SimState& state, Rng& rng) const {
  if (state.alive.empty()) return std::nullopt;
  return random_choose(state, rng);
}

PriorityPolicy PriorityPolicy::by_weight(const Instance& instance) {
  std::vector<TaskId> order;
  for (const TaskSpec& task : instance.tasks()) order.push_back(task.id);
  std::stable_sort(order.begin(), order.end(), [&](TaskId x, TaskId y) {
    return instance.task(x).weight > instance.task(y).weight;
  });
  return PriorityPolicy(std::move(order));
}

std::optional<TaskId> PriorityPolicy::choose(const SimState& state, Rng&) const {
  for (TaskId id : order_) {
    if (state.is_alive(id)) return id;
  }
  return std::nullopt;
}

DpPolicy::DpPolicy(std::shared_ptr<const Instance> instance, ModelKind model, Limits limits)
    : table_(std::make_unique<OracleTable>(std::move(instance), model,
                                           OracleLimits{limits.max_n, limits.max_m})) {}

DpPolicy::~DpPolicy() = default;

std::optional<TaskId> DpPolicy::choose(const SimState& state, Rng&) const {
  if (state.alive.empty()) return std::nullopt;
  std::lock_guard<std::mutex> lock(mutex_);
  return table_->best_action(state_key(state));
}

TaskId dp_choose(const SimState& state, DpPolicy::Limits limits) {
  require_alive(state);
  OracleTable table(state.context->instance, state.model, OracleLimits{limits.max_n, limits.max_m});
  return *table.best_action(state_key(state));
}

std::unique_ptr<Policy> make_policy(PolicyKind kind, std::shared_ptr<const Instance> instance,
                                    ModelKind model, const PolicyOptions& options) {
  switch (kind) {
    case PolicyKind::kRatio:
      return std::make_unique<RatioPolicy>(options.static_ratio);
    case PolicyKind::kWeight:
      return std::make_unique<WeightPolicy>();
    case PolicyKind::kRandom:
      return std::make_unique<RandomPolicy>();
    case PolicyKind::kDPOptimal:
      return std::make_unique<DpPolicy>(std::move(instance), model, options.dp_limits);
  }
  throw std::invalid_argument("unknown policy kind");
}

}  // namespace rsched
