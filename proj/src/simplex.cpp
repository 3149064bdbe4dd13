#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "rsched/lp.h"
#include "rsched/sparse_lu.h"

namespace rsched {
namespace {

using detail::SparseColumn;
using detail::SparseLU;

enum class VarState { kBasic, kAtLower, kAtUpper, kFreeZero, kFixed };

// Bounded computational form: A x - s = 0, with one logical s_r per row
// carrying the row relation as bounds, plus phase-1 artificials.
class RevisedSimplex {
 public:
  RevisedSimplex(const LPModel& model, const SimplexOptions& options)
      : model_(model), opt_(options) {
    n_ = model.num_variables();
    m_ = model.num_rows();
    cap_ = opt_.iteration_cap > 0 ? opt_.iteration_cap : 50L * (n_ + m_) + 100;

    columns_.assign(static_cast<std::size_t>(n_ + m_), {});
    for (int r = 0; r < m_; ++r) {
      for (const auto& [j, a] : model.rows()[static_cast<std::size_t>(r)].coeffs) {
        columns_[static_cast<std::size_t>(j)].emplace_back(r, a);
      }
    }
    const double sign = model.sense() == Sense::kMaximize ? -1.0 : 1.0;
    for (int j = 0; j < n_; ++j) {
      const LPVariable& v = model.variables()[static_cast<std::size_t>(j)];
      lower_.push_back(v.lower);
      upper_.push_back(v.upper);
      cost2_.push_back(sign * v.objective);
    }
    for (int r = 0; r < m_; ++r) {
      const LPRow& row = model.rows()[static_cast<std::size_t>(r)];
      columns_[static_cast<std::size_t>(n_ + r)] = {{r, -1.0}};
      switch (row.relation) {
        case RowRelation::kLessEqual:
          lower_.push_back(-kInf);
          upper_.push_back(row.rhs);
          break;
        case RowRelation::kGreaterEqual:
          lower_.push_back(row.rhs);
          upper_.push_back(kInf);
          break;
        case RowRelation::kEqual:
          lower_.push_back(row.rhs);
          upper_.push_back(row.rhs);
          break;
      }
      cost2_.push_back(0.0);
    }
  }

  LPSolution run() {
    LPSolution sol;
    for (int j = 0; j < n_; ++j) {
      if (lower_[static_cast<std::size_t>(j)] > upper_[static_cast<std::size_t>(j)]) {
        sol.status = LPStatus::kInfeasible;
        return sol;
      }
    }
    initial_basis();

    bool need_phase1 = num_vars() > n_ + m_;
    if (need_phase1) {
      cost_.assign(static_cast<std::size_t>(num_vars()), 0.0);
      for (int j = n_ + m_; j < num_vars(); ++j) cost_[static_cast<std::size_t>(j)] = 1.0;
      const LPStatus st = iterate(false);
      if (st == LPStatus::kIterationLimit) {
        sol.status = st;
        sol.iterations = iterations_;
        return sol;
      }
      double infeas = 0.0;
      for (int j = n_ + m_; j < num_vars(); ++j) infeas = std::max(infeas, x_[static_cast<std::size_t>(j)]);
      if (infeas > opt_.feasibility_tol * 10.0) {
        sol.status = LPStatus::kInfeasible;
        sol.iterations = iterations_;
        return sol;
      }
      for (int j = n_ + m_; j < num_vars(); ++j) {
        upper_[static_cast<std::size_t>(j)] = 0.0;
        if (state_[static_cast<std::size_t>(j)] != VarState::kBasic) {
          state_[static_cast<std::size_t>(j)] = VarState::kFixed;
          x_[static_cast<std::size_t>(j)] = 0.0;
        }
      }
      refactor();
    }
    cost_ = cost2_;
    cost_.resize(static_cast<std::size_t>(num_vars()), 0.0);
    const LPStatus st = iterate(true);
    sol.status = st;
    sol.iterations = iterations_;
    if (st != LPStatus::kOptimal) return sol;

    refactor();
    std::vector<double> y = duals();
    const bool maximize = model_.sense() == Sense::kMaximize;
    sol.x.assign(x_.begin(), x_.begin() + n_);
    for (int j = 0; j < n_; ++j) {
      // Snap nonbasic values onto their bounds exactly.
      if (state_[static_cast<std::size_t>(j)] == VarState::kAtLower) sol.x[static_cast<std::size_t>(j)] = lower_[static_cast<std::size_t>(j)];
      if (state_[static_cast<std::size_t>(j)] == VarState::kAtUpper) sol.x[static_cast<std::size_t>(j)] = upper_[static_cast<std::size_t>(j)];
    }
    sol.duals.resize(static_cast<std::size_t>(m_));
    for (int r = 0; r < m_; ++r) sol.duals[static_cast<std::size_t>(r)] = maximize ? -y[static_cast<std::size_t>(r)] : y[static_cast<std::size_t>(r)];
    sol.reduced_costs.resize(static_cast<std::size_t>(n_));
    for (int j = 0; j < n_; ++j) {
      const double d = reduced_cost(j, y);
      sol.reduced_costs[static_cast<std::size_t>(j)] = maximize ? -d : d;
    }
    sol.objective = 0.0;
    for (int j = 0; j < n_; ++j) {
      sol.objective += model_.variables()[static_cast<std::size_t>(j)].objective * sol.x[static_cast<std::size_t>(j)];
    }
    return sol;
  }

 private:
  int num_vars() const { return static_cast<int>(columns_.size()); }

  static VarState rest_state(double lo, double hi) {
    if (lo == hi) return VarState::kFixed;
    if (std::isfinite(lo)) return VarState::kAtLower;
    if (std::isfinite(hi)) return VarState::kAtUpper;
    return VarState::kFreeZero;
  }

  static double rest_value(VarState s, double lo, double hi) {
    switch (s) {
      case VarState::kFixed:
      case VarState::kAtLower: return lo;
      case VarState::kAtUpper: return hi;
      default: return 0.0;
    }
  }

  void initial_basis() {
    x_.assign(static_cast<std::size_t>(n_ + m_), 0.0);
    state_.assign(static_cast<std::size_t>(n_ + m_), VarState::kBasic);
    for (int j = 0; j < n_; ++j) {
      const auto s = rest_state(lower_[static_cast<std::size_t>(j)], upper_[static_cast<std::size_t>(j)]);
      state_[static_cast<std::size_t>(j)] = s;
      x_[static_cast<std::size_t>(j)] = rest_value(s, lower_[static_cast<std::size_t>(j)], upper_[static_cast<std::size_t>(j)]);
    }
    std::vector<double> activity(static_cast<std::size_t>(m_), 0.0);
    for (int j = 0; j < n_; ++j) {
      const double xj = x_[static_cast<std::size_t>(j)];
      if (xj == 0.0) continue;
      for (const auto& [r, a] : columns_[static_cast<std::size_t>(j)]) activity[static_cast<std::size_t>(r)] += a * xj;
    }
    basis_.assign(static_cast<std::size_t>(m_), -1);
    for (int r = 0; r < m_; ++r) {
      const int s = n_ + r;
      const double lo = lower_[static_cast<std::size_t>(s)];
      const double hi = upper_[static_cast<std::size_t>(s)];
      const double act = activity[static_cast<std::size_t>(r)];
      const double tol = opt_.feasibility_tol;
      if (act >= lo - tol && act <= hi + tol) {
        basis_[static_cast<std::size_t>(r)] = s;
        state_[static_cast<std::size_t>(s)] = VarState::kBasic;
        x_[static_cast<std::size_t>(s)] = act;
        continue;
      }
      const double bound = act < lo ? lo : hi;
      state_[static_cast<std::size_t>(s)] = lo == hi ? VarState::kFixed : (act < lo ? VarState::kAtLower : VarState::kAtUpper);
      x_[static_cast<std::size_t>(s)] = bound;
      // a x - s + sigma * art = 0 with art = |bound - act|.
      const double sigma = bound > act ? 1.0 : -1.0;
      columns_.push_back({{r, sigma}});
      lower_.push_back(0.0);
      upper_.push_back(kInf);
      x_.push_back(std::abs(bound - act));
      state_.push_back(VarState::kBasic);
      basis_[static_cast<std::size_t>(r)] = num_vars() - 1;
    }
    refactor();
  }

  void refactor() {
    std::vector<SparseColumn> cols(static_cast<std::size_t>(m_));
    for (int k = 0; k < m_; ++k) cols[static_cast<std::size_t>(k)] = columns_[static_cast<std::size_t>(basis_[static_cast<std::size_t>(k)])];
    auto singular = lu_.factor(m_, cols, opt_.pivot_tol);
    while (!singular.empty()) {
      // Swap unpivoted positions for the logicals of unpivoted rows.
      for (std::size_t i = 0; i < singular.positions.size(); ++i) {
        const int pos = singular.positions[i];
        const int old = basis_[static_cast<std::size_t>(pos)];
        const int logical = n_ + singular.rows[i];
        const double lo = lower_[static_cast<std::size_t>(old)];
        const double hi = upper_[static_cast<std::size_t>(old)];
        VarState s = rest_state(lo, hi);
        double v = rest_value(s, lo, hi);
        if (s == VarState::kAtLower && std::isfinite(hi) &&
            std::abs(x_[static_cast<std::size_t>(old)] - hi) < std::abs(x_[static_cast<std::size_t>(old)] - lo)) {
          s = VarState::kAtUpper;
          v = hi;
        }
        state_[static_cast<std::size_t>(old)] = s;
        x_[static_cast<std::size_t>(old)] = v;
        basis_[static_cast<std::size_t>(pos)] = logical;
        state_[static_cast<std::size_t>(logical)] = VarState::kBasic;
        cols[static_cast<std::size_t>(pos)] = columns_[static_cast<std::size_t>(logical)];
      }
      singular = lu_.factor(m_, cols, opt_.pivot_tol);
    }
    recompute_basic_values();
  }

  void recompute_basic_values() {
    std::vector<double> rhs(static_cast<std::size_t>(m_), 0.0);
    for (int j = 0; j < num_vars(); ++j) {
      if (state_[static_cast<std::size_t>(j)] == VarState::kBasic) continue;
      const double xj = x_[static_cast<std::size_t>(j)];
      if (xj == 0.0) continue;
      for (const auto& [r, a] : columns_[static_cast<std::size_t>(j)]) rhs[static_cast<std::size_t>(r)] -= a * xj;
    }
    lu_.ftran(rhs);
    for (int k = 0; k < m_; ++k) x_[static_cast<std::size_t>(basis_[static_cast<std::size_t>(k)])] = rhs[static_cast<std::size_t>(k)];
  }

  std::vector<double> duals() const {
    std::vector<double> c(static_cast<std::size_t>(m_));
    for (int k = 0; k < m_; ++k) c[static_cast<std::size_t>(k)] = cost_[static_cast<std::size_t>(basis_[static_cast<std::size_t>(k)])];
    lu_.btran(c);
    return c;
  }

  double reduced_cost(int j, const std::vector<double>& y) const {
    double d = cost_[static_cast<std::size_t>(j)];
    for (const auto& [r, a] : columns_[static_cast<std::size_t>(j)]) d -= y[static_cast<std::size_t>(r)] * a;
    return d;
  }

  // Entering variable and direction (+1 increase, -1 decrease); -1 if optimal.
  std::pair<int, int> price(const std::vector<double>& y) const {
    int best = -1;
    int dir = 0;
    double best_score = 0.0;
    const double tol = opt_.optimality_tol;
    for (int j = 0; j < num_vars(); ++j) {
      const VarState s = state_[static_cast<std::size_t>(j)];
      if (s == VarState::kBasic || s == VarState::kFixed) continue;
      const double d = reduced_cost(j, y);
      int want = 0;
      if (s == VarState::kAtLower && d < -tol) want = 1;
      else if (s == VarState::kAtUpper && d > tol) want = -1;
      else if (s == VarState::kFreeZero && std::abs(d) > tol) want = d < 0 ? 1 : -1;
      if (want == 0) continue;
      if (bland_) return {j, want};
      if (std::abs(d) > best_score) {
        best_score = std::abs(d);
        best = j;
        dir = want;
      }
    }
    return {best, dir};
  }

  LPStatus iterate(bool phase2) {
    std::vector<double> alpha;
    while (true) {
      if (iterations_ >= cap_) return LPStatus::kIterationLimit;
      if (lu_.num_updates() >= opt_.refactor_interval) refactor();
      const std::vector<double> y = duals();
      const auto [q, dir] = price(y);
      if (q < 0) return LPStatus::kOptimal;

      alpha.assign(static_cast<std::size_t>(m_), 0.0);
      for (const auto& [r, a] : columns_[static_cast<std::size_t>(q)]) alpha[static_cast<std::size_t>(r)] = a;
      lu_.ftran(alpha);

      // Basic k moves by -dir * alpha_k * theta.
      const double ftol = opt_.feasibility_tol;
      auto bound_gap = [&](int k, bool relaxed) {
        const double a = -dir * alpha[static_cast<std::size_t>(k)];
        const int v = basis_[static_cast<std::size_t>(k)];
        const double xv = x_[static_cast<std::size_t>(v)];
        const double slack = relaxed ? ftol : 0.0;
        if (a < 0 && std::isfinite(lower_[static_cast<std::size_t>(v)])) {
          return (xv - lower_[static_cast<std::size_t>(v)] + slack) / -a;
        }
        if (a > 0 && std::isfinite(upper_[static_cast<std::size_t>(v)])) {
          return (upper_[static_cast<std::size_t>(v)] - xv + slack) / a;
        }
        return kInf;
      };
      const double flip = upper_[static_cast<std::size_t>(q)] - lower_[static_cast<std::size_t>(q)];
      int leave = -1;
      double theta = kInf;
      if (bland_) {
        for (int k = 0; k < m_; ++k) {
          if (std::abs(alpha[static_cast<std::size_t>(k)]) <= opt_.pivot_tol) continue;
          const double t = std::max(bound_gap(k, false), 0.0);
          if (t < theta - 1e-12 ||
              (t <= theta + 1e-12 && leave >= 0 && basis_[static_cast<std::size_t>(k)] < basis_[static_cast<std::size_t>(leave)])) {
            theta = std::min(theta, t);
            leave = k;
          }
        }
      } else {
        double theta_max = kInf;
        for (int k = 0; k < m_; ++k) {
          if (std::abs(alpha[static_cast<std::size_t>(k)]) <= opt_.pivot_tol) continue;
          theta_max = std::min(theta_max, bound_gap(k, true));
        }
        double best_mag = 0.0;
        for (int k = 0; k < m_; ++k) {
          const double mag = std::abs(alpha[static_cast<std::size_t>(k)]);
          if (mag <= opt_.pivot_tol) continue;
          const double t = bound_gap(k, false);
          if (t <= theta_max && mag > best_mag) {
            best_mag = mag;
            leave = k;
            theta = std::max(t, 0.0);
          }
        }
      }
      if (flip <= theta) {
        leave = -1;
        theta = flip;
      }
      if (!std::isfinite(theta)) {
        return phase2 ? LPStatus::kUnbounded : LPStatus::kIterationLimit;
      }
      ++iterations_;
      if (theta < 1e-12) {
        if (++degenerate_streak_ > opt_.degenerate_switch) bland_ = true;
      } else {
        degenerate_streak_ = 0;
        bland_ = false;
      }

      for (int k = 0; k < m_; ++k) {
        const double a = alpha[static_cast<std::size_t>(k)];
        if (a != 0.0) x_[static_cast<std::size_t>(basis_[static_cast<std::size_t>(k)])] -= dir * theta * a;
      }
      if (leave < 0) {
        const bool to_upper = dir > 0;
        state_[static_cast<std::size_t>(q)] = to_upper ? VarState::kAtUpper : VarState::kAtLower;
        x_[static_cast<std::size_t>(q)] = to_upper ? upper_[static_cast<std::size_t>(q)] : lower_[static_cast<std::size_t>(q)];
        continue;
      }
      x_[static_cast<std::size_t>(q)] += dir * theta;
      const int out = basis_[static_cast<std::size_t>(leave)];
      const double a_out = -dir * alpha[static_cast<std::size_t>(leave)];
      const double lo = lower_[static_cast<std::size_t>(out)];
      const double hi = upper_[static_cast<std::size_t>(out)];
      if (lo == hi) {
        state_[static_cast<std::size_t>(out)] = VarState::kFixed;
        x_[static_cast<std::size_t>(out)] = lo;
      } else if (a_out < 0) {
        state_[static_cast<std::size_t>(out)] = VarState::kAtLower;
        x_[static_cast<std::size_t>(out)] = lo;
      } else {
        state_[static_cast<std::size_t>(out)] = VarState::kAtUpper;
        x_[static_cast<std::size_t>(out)] = hi;
      }
      basis_[static_cast<std::size_t>(leave)] = q;
      state_[static_cast<std::size_t>(q)] = VarState::kBasic;
      lu_.update(leave, alpha);
    }
  }

  const LPModel& model_;
  SimplexOptions opt_;
  int n_ = 0;
  int m_ = 0;
  long cap_ = 0;
  long iterations_ = 0;
  int degenerate_streak_ = 0;
  bool bland_ = false;

  std::vector<SparseColumn> columns_;
  std::vector<double> lower_;
  std::vector<double> upper_;
  std::vector<double> cost2_;
  std::vector<double> cost_;
  std::vector<double> x_;
  std::vector<VarState> state_;
  std::vector<int> basis_;
  SparseLU lu_;
};

}  // namespace

LPSolution solve_lp(const LPModel& model, const SimplexOptions& options) {
  return RevisedSimplex(model, options).run();
}

}  // namespace rsched
