#include "rsched/relax.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace rsched {
namespace {

std::string name_of(const char* stem, int a) { return std::string(stem) + "_" + std::to_string(a); }
std::string name_of(const char* stem, int a, int b) { return name_of(stem, a) + "_" + std::to_string(b); }
std::string name_of(const char* stem, int a, int b, int c) {
  return name_of(stem, a, b) + "_" + std::to_string(c);
}

// WIS restricted to the indices with `allowed[i]`.
double wis_value_masked(std::span<const Interval> intervals, std::span<const double> weights,
                        const std::vector<char>& allowed) {
  std::vector<int> order;
  for (std::size_t i = 0; i < intervals.size(); ++i) {
    if (allowed[i]) order.push_back(static_cast<int>(i));
  }
  std::sort(order.begin(), order.end(), [&](int x, int y) {
    return intervals[static_cast<std::size_t>(x)].hi < intervals[static_cast<std::size_t>(y)].hi;
  });
  std::vector<Slot> ends;
  ends.reserve(order.size());
  for (int i : order) ends.push_back(intervals[static_cast<std::size_t>(i)].hi);
  std::vector<double> best(order.size() + 1, 0.0);
  for (std::size_t j = 0; j < order.size(); ++j) {
    const auto& iv = intervals[static_cast<std::size_t>(order[j])];
    // Number of intervals ending strictly before this one starts.
    const auto pred = static_cast<std::size_t>(
        std::lower_bound(ends.begin(), ends.begin() + static_cast<std::ptrdiff_t>(j), iv.lo) - ends.begin());
    best[j + 1] = std::max(best[j], best[pred] + weights[static_cast<std::size_t>(order[j])]);
  }
  return best.back();
}

bool overlaps(const Interval& x, const Interval& y) { return x.lo <= y.hi && y.lo <= x.hi; }

}  // namespace

double wis_value(std::span<const Interval> intervals, std::span<const double> weights) {
  return wis_value_masked(intervals, weights, std::vector<char>(intervals.size(), 1));
}

WisResult wis_max(std::span<const Interval> intervals, std::span<const double> weights) {
  const std::size_t n = intervals.size();
  WisResult result;
  result.value = wis_value(intervals, weights);
  const double tol = 1e-12 * std::max(1.0, std::abs(result.value));
  double taken = 0.0;
  std::vector<char> open(n, 1);  // undecided and compatible with the chosen set
  for (std::size_t i = 0; i < n; ++i) {
    if (!open[i]) continue;
    open[i] = 0;
    std::vector<char> rest(open);
    for (std::size_t j = i + 1; j < n; ++j) {
      if (rest[j] && overlaps(intervals[i], intervals[j])) rest[j] = 0;
    }
    const double with = taken + weights[i] + wis_value_masked(intervals, weights, rest);
    if (with >= result.value - tol) {
      result.chosen.push_back(static_cast<int>(i));
      taken += weights[i];
      open = std::move(rest);
    }
  }
  return result;
}

PessimisticGraph pessimistic_graph(const Instance& instance) {
  PessimisticGraph graph;
  graph.m = instance.m();
  for (const TaskSpec& task : instance.tasks()) {
    graph.spans.push_back({task.a(), task.d()});
    graph.weights.push_back(task.weight);
  }
  return graph;
}

LPModel build_lp_p(const PessimisticGraph& graph) {
  LPModel model(Sense::kMaximize);
  const int n = static_cast<int>(graph.spans.size());
  for (int i = 0; i < n; ++i) model.add_variable(name_of("x", i + 1), graph.weights[static_cast<std::size_t>(i)]);
  for (Slot r = 1; r <= graph.m; ++r) {
    std::vector<std::pair<int, double>> coeffs;
    for (int i = 0; i < n; ++i) {
      const Interval& s = graph.spans[static_cast<std::size_t>(i)];
      if (s.lo <= r && r <= s.hi) coeffs.emplace_back(i, 1.0);
    }
    model.add_row(name_of("clique", r), std::move(coeffs), RowRelation::kLessEqual, 1.0);
  }
  return model;
}

LPModel build_lp_d(const PessimisticGraph& graph) {
  LPModel model(Sense::kMinimize);
  for (Slot r = 1; r <= graph.m; ++r) model.add_variable(name_of("mu", r), 1.0);
  for (std::size_t i = 0; i < graph.spans.size(); ++i) {
    std::vector<std::pair<int, double>> coeffs;
    for (Slot r = graph.spans[i].lo; r <= graph.spans[i].hi; ++r) coeffs.emplace_back(r - 1, 1.0);
    model.add_row(name_of("cover", static_cast<int>(i) + 1), std::move(coeffs), RowRelation::kGreaterEqual,
                  graph.weights[i]);
  }
  return model;
}

double solve_value(const LPModel& model, const LPBackend& backend, const char* what) {
  const LPSolution sol = backend.solve(model);
  if (sol.status != LPStatus::kOptimal) {
    throw SolverError(std::string(what) + ": " + to_string(sol.status));
  }
  return sol.objective;
}

AlphaPes alpha_pes(const Instance& instance, const LPBackend& backend) {
  const PessimisticGraph graph = pessimistic_graph(instance);
  const WisResult wis = wis_max(graph.spans, graph.weights);
  AlphaPes result;
  result.value = wis.value;
  for (int i : wis.chosen) result.chosen.push_back(i + 1);

  const LPSolution sol = backend.solve(build_lp_d(graph));
  if (sol.status != LPStatus::kOptimal) {
    throw SolverError("clique cover LP: " + to_string(sol.status));
  }
  if (std::abs(sol.objective - wis.value) > 1e-7 * std::max(1.0, std::abs(wis.value))) {
    throw SolverError("clique cover LP value " + std::to_string(sol.objective) +
                      " differs from the interval scheduling optimum " + std::to_string(wis.value));
  }
  result.mu = sol.x;
  return result;
}

LPModel build_dlp_p(const Instance& instance, DlpOptions options) {
  const int n = instance.n();
  const int m = instance.m();
  const int stages = options.stages > 0 ? options.stages : std::min(m, n);
  LPModel model(Sense::kMaximize);

  struct Columns {
    int x;
    int xs0;  // xs for slot a_i
    int xe0;  // xe for slot c_i
  };
  std::vector<std::vector<Columns>> cols(static_cast<std::size_t>(stages));
  for (int t = 1; t <= stages; ++t) {
    for (const TaskSpec& task : instance.tasks()) {
      Columns c{};
      c.x = model.add_variable(name_of("x", task.id, t), task.weight);
      c.xs0 = model.num_variables();
      for (Slot k = task.a(); k <= task.b(); ++k) model.add_variable(name_of("xs", task.id, k, t), 0.0);
      c.xe0 = model.num_variables();
      for (Slot k = task.c(); k <= task.d(); ++k) model.add_variable(name_of("xe", task.id, k, t), 0.0);
      cols[static_cast<std::size_t>(t - 1)].push_back(c);
    }
  }

  for (int t = 1; t <= stages; ++t) {
    for (const TaskSpec& task : instance.tasks()) {
      const Columns& c = cols[static_cast<std::size_t>(t - 1)][static_cast<std::size_t>(task.id - 1)];
      std::vector<std::pair<int, double>> start{{c.x, 1.0}};
      for (Slot k = task.a(); k <= task.b(); ++k) start.emplace_back(c.xs0 + (k - task.a()), -1.0);
      model.add_row(name_of("link_s", task.id, t), std::move(start), RowRelation::kEqual, 0.0);
      std::vector<std::pair<int, double>> end{{c.x, 1.0}};
      for (Slot k = task.c(); k <= task.d(); ++k) end.emplace_back(c.xe0 + (k - task.c()), -1.0);
      model.add_row(name_of("link_e", task.id, t), std::move(end), RowRelation::kEqual, 0.0);
    }
  }

  for (Slot k = 1; k <= m; ++k) {
    std::vector<std::pair<int, double>> coeffs;
    for (int t = 1; t <= stages; ++t) {
      for (const TaskSpec& task : instance.tasks()) {
        if (k < task.a() || k > task.d()) continue;
        const Columns& c = cols[static_cast<std::size_t>(t - 1)][static_cast<std::size_t>(task.id - 1)];
        coeffs.emplace_back(c.x, 1.0);
        if (k <= task.b()) {
          for (Slot l = k + 1; l <= task.b(); ++l) coeffs.emplace_back(c.xs0 + (l - task.a()), -1.0);
        }
        if (k >= task.c()) {
          for (Slot l = task.c(); l <= k - 1; ++l) coeffs.emplace_back(c.xe0 + (l - task.c()), -1.0);
        }
      }
    }
    model.add_row(name_of("slot", k), std::move(coeffs), RowRelation::kLessEqual, 1.0);
  }

  for (const TaskSpec& task : instance.tasks()) {
    for (Slot k = task.a(); k <= task.b(); ++k) {
      std::vector<std::pair<int, double>> coeffs;
      for (int t = 1; t <= stages; ++t) {
        coeffs.emplace_back(cols[static_cast<std::size_t>(t - 1)][static_cast<std::size_t>(task.id - 1)].xs0 + (k - task.a()), 1.0);
      }
      model.add_row(name_of("cap_s", task.id, k), std::move(coeffs), RowRelation::kLessEqual, task.start.prob(k));
    }
    for (Slot k = task.c(); k <= task.d(); ++k) {
      std::vector<std::pair<int, double>> coeffs;
      for (int t = 1; t <= stages; ++t) {
        coeffs.emplace_back(cols[static_cast<std::size_t>(t - 1)][static_cast<std::size_t>(task.id - 1)].xe0 + (k - task.c()), 1.0);
      }
      model.add_row(name_of("cap_e", task.id, k), std::move(coeffs), RowRelation::kLessEqual, task.end.prob(k));
    }
  }
  return model;
}

LPModel build_cdlp_p(const Instance& instance, bool box) {
  const OccupancyProfile occ = occupancy_profile(instance);
  LPModel model(Sense::kMaximize);
  for (const TaskSpec& task : instance.tasks()) {
    model.add_variable(name_of("x", task.id), task.weight, 0.0, box ? 1.0 : kInf);
  }
  for (Slot k = 1; k <= instance.m(); ++k) {
    std::vector<std::pair<int, double>> coeffs;
    for (const TaskSpec& task : instance.tasks()) {
      const double p = occ.occ(task.id, k);
      if (p > 0.0) coeffs.emplace_back(task.id - 1, p);
    }
    model.add_row(name_of("slot", k), std::move(coeffs), RowRelation::kLessEqual, 1.0);
  }
  return model;
}

LPModel build_cdlp_d(const Instance& instance) {
  const OccupancyProfile occ = occupancy_profile(instance);
  LPModel model(Sense::kMinimize);
  for (Slot r = 1; r <= instance.m(); ++r) model.add_variable(name_of("mu", r), 1.0);
  for (const TaskSpec& task : instance.tasks()) {
    std::vector<std::pair<int, double>> coeffs;
    for (Slot r = 1; r <= instance.m(); ++r) {
      const double p = occ.occ(task.id, r);
      if (p > 0.0) coeffs.emplace_back(r - 1, p);
    }
    model.add_row(name_of("cover", task.id), std::move(coeffs), RowRelation::kGreaterEqual, task.weight);
  }
  return model;
}

std::vector<double> lp_dpes_costs(const Instance& instance) {
  const int m = instance.m();
  std::vector<double> cost(static_cast<std::size_t>(m), 1.0);
  for (const TaskSpec& task : instance.tasks()) {
    double started = 0.0;  // Pr[s <= r]
    double ended = 0.0;    // Pr[e < r]
    for (Slot r = 1; r <= m; ++r) {
      started += task.start.prob(r);
      if (r > 1) ended += task.end.prob(r - 1);
      double extra = 0.0;
      if (r >= task.a()) extra += std::max(0.0, 1.0 - started);
      if (r <= task.d()) extra += ended;
      cost[static_cast<std::size_t>(r - 1)] += extra;
    }
  }
  return cost;
}

LPModel build_lp_dpes(const Instance& instance) {
  const std::vector<double> cost = lp_dpes_costs(instance);
  LPModel model(Sense::kMinimize);
  for (Slot r = 1; r <= instance.m(); ++r) model.add_variable(name_of("mu", r), cost[static_cast<std::size_t>(r - 1)]);
  for (const TaskSpec& task : instance.tasks()) {
    std::vector<std::pair<int, double>> coeffs;
    for (Slot r = task.a(); r <= task.d(); ++r) coeffs.emplace_back(r - 1, 1.0);
    model.add_row(name_of("cover", task.id), std::move(coeffs), RowRelation::kGreaterEqual, task.weight);
  }
  return model;
}

double dual_upper_bound_dsrse(const Instance& instance, std::span<const double> mu) {
  const std::vector<double> cost = lp_dpes_costs(instance);
  double total = 0.0;
  for (std::size_t r = 0; r < cost.size() && r < mu.size(); ++r) total += mu[r] * cost[r];
  return total;
}

PStarBound cdsrse_pstar_bound(const Instance& instance, double alpha_pes_value) {
  const OccupancyProfile occ = occupancy_profile(instance);
  double p_star = kInf;
  for (const TaskSpec& task : instance.tasks()) {
    for (Slot k = 1; k <= instance.m(); ++k) {
      const double p = occ.occ(task.id, k);
      if (p > 0.0) p_star = std::min(p_star, p);
    }
  }
  if (!std::isfinite(p_star)) throw DegenerateInstanceError("no positive occupancy probability");
  return {p_star, alpha_pes_value / p_star};
}

StabbingCover stabbing_cover(const PessimisticGraph& graph) {
  const std::size_t n = graph.spans.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return graph.spans[x].hi < graph.spans[y].hi; });
  StabbingCover cover;
  for (std::size_t i : order) {
    if (cover.points.empty() || cover.points.back() < graph.spans[i].lo) cover.points.push_back(graph.spans[i].hi);
  }
  cover.assignment.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto first = std::lower_bound(cover.points.begin(), cover.points.end(), graph.spans[i].lo);
    const auto last = std::upper_bound(cover.points.begin(), cover.points.end(), graph.spans[i].hi);
    cover.assignment[i] = *first;
    if (last - first > 1) cover.multiply_covered.push_back(static_cast<TaskId>(i) + 1);
  }
  return cover;
}

UniformBounds uniform_weight_bounds(const Instance& instance) {
  for (const TaskSpec& task : instance.tasks()) {
    if (task.weight != 1.0) {
      throw UnsupportedWeightsError("uniform-weight bounds need unit weights (task " +
                                    std::to_string(task.id) + ")");
    }
  }
  const PessimisticGraph graph = pessimistic_graph(instance);
  const OccupancyProfile occ = occupancy_profile(instance);
  UniformBounds bounds;
  bounds.cover = stabbing_cover(graph);
  const double alpha = wis_value(graph.spans, graph.weights);
  double slack = 0.0;
  double least = 1.0;
  for (const TaskSpec& task : instance.tasks()) {
    const double p = occ.occ(task.id, bounds.cover.assignment[static_cast<std::size_t>(task.id - 1)]);
    slack += 1.0 - p;
    least = std::min(least, p);
  }
  if (least <= 0.0) {
    throw DegenerateInstanceError("a task never occupies its stabbing point");
  }
  bounds.dsrse = alpha + slack;
  bounds.cdsrse = alpha / least;
  return bounds;
}

BoundsReport compute_bounds(const Instance& instance, const BoundsOptions& options,
                            const LPBackend& backend) {
  BoundsReport report;
  const AlphaPes ap = alpha_pes(instance, backend);
  report.alpha_pes = ap.value;
  report.dsrse_dual_bound = dual_upper_bound_dsrse(instance, ap.mu);
  const PStarBound ps = cdsrse_pstar_bound(instance, ap.value);
  report.p_star = ps.p_star;
  report.cdsrse_pstar_bound = ps.bound;
  const bool unit = std::all_of(instance.tasks().begin(), instance.tasks().end(),
                                [](const TaskSpec& t) { return t.weight == 1.0; });
  if (unit && instance.n() > 0) {
    try {
      const UniformBounds ub = uniform_weight_bounds(instance);
      report.uniform_dsrse_bound = ub.dsrse;
      report.uniform_cdsrse_bound = ub.cdsrse;
      report.multiply_covered = ub.cover.multiply_covered;
    } catch (const DegenerateInstanceError&) {
    }
  }
  if (options.solve_lps) {
    report.dlp_value = solve_value(build_dlp_p(instance, options.dlp), backend, "DLP-P");
    report.lp_dpes_value = solve_value(build_lp_dpes(instance), backend, "LP-Dpes");
    report.cdlp_value = solve_value(build_cdlp_p(instance, options.box), backend, "CDLP-P");
  }
  return report;
}

}  // namespace rsched
