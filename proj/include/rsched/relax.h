#pragma once

// Deterministic interval scheduling, LP relaxations of both stochastic
// models, and closed-form upper bounds.

#include <optional>
#include <span>
#include <vector>

#include "rsched/core.h"
#include "rsched/lp.h"

namespace rsched {

struct Interval {
  Slot lo;
  Slot hi;
};

struct WisResult {
  double value = 0.0;
  std::vector<int> chosen;  // input indices, ascending
};

// Maximum-weight set of pairwise slot-disjoint intervals. Among optimal sets
// the lexicographically smallest index list is returned.
WisResult wis_max(std::span<const Interval> intervals, std::span<const double> weights);

// Optimal value only; O(n log n).
double wis_value(std::span<const Interval> intervals, std::span<const double> weights);

// Each task widened to its span [a_i, d_i].
struct PessimisticGraph {
  int m = 0;
  std::vector<Interval> spans;  // index id-1
  std::vector<double> weights;
};

PessimisticGraph pessimistic_graph(const Instance& instance);

// Clique LP pair on an interval graph: one clique per slot.
// Primal: max w.x, sum_{i : r in span_i} x_i <= 1 for every slot r, x >= 0.
LPModel build_lp_p(const PessimisticGraph& graph);
// Dual: min sum_r mu_r, sum_{r in span_i} mu_r >= w_i, mu >= 0.
LPModel build_lp_d(const PessimisticGraph& graph);

struct AlphaPes {
  double value = 0.0;
  std::vector<int> chosen;  // task ids of the optimal pessimistic schedule
  std::vector<double> mu;   // slot duals, index r-1
};

// Throws SolverError when the clique LP disagrees with the combinatorial
// optimum by more than 1e-7.
AlphaPes alpha_pes(const Instance& instance, const LPBackend& backend = SimplexBackend());

struct DlpOptions {
  // Number of stages T; 0 means min(m, n).
  int stages = 0;
};

// DSRSE relaxation with stage copies x_i_t, start variables xs_i_k_t on
// [a_i, b_i] and end variables xe_i_k_t on [c_i, d_i].
LPModel build_dlp_p(const Instance& instance, DlpOptions options = {});

// CDSRSE relaxation: max w.x, sum_i P^o_ik x_i <= 1 for every slot k, x >= 0,
// optionally x <= 1.
LPModel build_cdlp_p(const Instance& instance, bool box = false);
// min sum_r mu_r, sum_r P^o_ir mu_r >= w_i, mu >= 0.
LPModel build_cdlp_d(const Instance& instance);

// The DSRSE dual restricted to the slot multipliers mu_r.
LPModel build_lp_dpes(const Instance& instance);

// Objective coefficient of mu_r in build_lp_dpes, index r-1:
// 1 + sum_{i : a_i <= r} Pr[s_i > r] + sum_{i : r <= d_i} Pr[e_i < r].
std::vector<double> lp_dpes_costs(const Instance& instance);

// Value of the LP-Dpes objective at `mu` (a feasible clique cover of the
// pessimistic graph). Upper-bounds the DSRSE optimum.
double dual_upper_bound_dsrse(const Instance& instance, std::span<const double> mu);

struct PStarBound {
  double p_star = 0.0;
  double bound = 0.0;
};

// p* = smallest positive occupancy probability, bound = alpha_pes / p*.
PStarBound cdsrse_pstar_bound(const Instance& instance, double alpha_pes_value);

struct StabbingCover {
  std::vector<Slot> points;       // sorted
  std::vector<Slot> assignment;   // index id-1: smallest point inside the span
  std::vector<TaskId> multiply_covered;  // tasks whose span holds more than one point
};

// Greedy right-endpoint sweep; minimum for unit weights.
StabbingCover stabbing_cover(const PessimisticGraph& graph);

struct UniformBounds {
  double dsrse = 0.0;
  double cdsrse = 0.0;
  StabbingCover cover;
};

// Requires unit weights.
UniformBounds uniform_weight_bounds(const Instance& instance);

struct BoundsOptions {
  bool solve_lps = true;
  bool box = false;
  DlpOptions dlp;
};

struct BoundsReport {
  double alpha_pes = 0.0;
  double dsrse_dual_bound = 0.0;
  double cdsrse_pstar_bound = 0.0;
  double p_star = 0.0;
  std::optional<double> uniform_dsrse_bound;
  std::optional<double> uniform_cdsrse_bound;
  std::optional<double> dlp_value;
  std::optional<double> lp_dpes_value;
  std::optional<double> cdlp_value;
  std::vector<TaskId> multiply_covered;
};

BoundsReport compute_bounds(const Instance& instance, const BoundsOptions& options = {},
                            const LPBackend& backend = SimplexBackend());

// Optimal objective or SolverError naming the model.
double solve_value(const LPModel& model, const LPBackend& backend, const char* what);

}  // namespace rsched
