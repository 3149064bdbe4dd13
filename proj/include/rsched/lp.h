#pragma once

// Sparse linear programs, their solutions, a text exchange format, and the
// built-in revised simplex solver.

#include <iosfwd>
#include <limits>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace rsched {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Sense { kMaximize, kMinimize };
enum class RowRelation { kLessEqual, kEqual, kGreaterEqual };

struct LPVariable {
  std::string name;
  double objective = 0.0;
  double lower = 0.0;
  double upper = kInf;
};

struct LPRow {
  std::string name;
  std::vector<std::pair<int, double>> coeffs;  // (column, coefficient)
  RowRelation relation = RowRelation::kLessEqual;
  double rhs = 0.0;
};

class LPModel {
 public:
  explicit LPModel(Sense sense = Sense::kMaximize) : sense_(sense) {}

  int add_variable(std::string name, double objective, double lower = 0.0, double upper = kInf);
  // Duplicate columns in `coeffs` are summed; zero coefficients dropped.
  int add_row(std::string name, std::vector<std::pair<int, double>> coeffs, RowRelation relation,
              double rhs);

  Sense sense() const { return sense_; }
  void set_sense(Sense sense) { sense_ = sense; }
  int num_variables() const { return static_cast<int>(variables_.size()); }
  int num_rows() const { return static_cast<int>(rows_.size()); }
  const std::vector<LPVariable>& variables() const { return variables_; }
  const std::vector<LPRow>& rows() const { return rows_; }
  LPVariable& variable(int j) { return variables_.at(static_cast<std::size_t>(j)); }
  std::size_t nonzeros() const;

  // Column index by name, or -1.
  int find_variable(const std::string& name) const;

 private:
  Sense sense_;
  std::vector<LPVariable> variables_;
  std::vector<LPRow> rows_;
};

enum class LPStatus { kOptimal, kInfeasible, kUnbounded, kIterationLimit };

std::string to_string(LPStatus status);

struct LPSolution {
  LPStatus status = LPStatus::kIterationLimit;
  double objective = 0.0;
  std::vector<double> x;
  // Row duals in the model's own sense: for a maximization, <= rows carry
  // nonnegative duals; for a minimization, >= rows do.
  std::vector<double> duals;
  std::vector<double> reduced_costs;
  long iterations = 0;
};

// Residuals of a reported optimum, recomputed from the model.
struct LPCertificate {
  double primal_residual = 0.0;          // worst row or bound violation
  double dual_residual = 0.0;            // worst sign violation of duals / reduced costs
  double complementarity_residual = 0.0;  // worst |dual * slack| and |reduced cost * gap|
  double dual_objective = 0.0;           // b'y plus bound terms
  double objective_gap = 0.0;            // |primal - dual objective|
};

LPCertificate check_solution(const LPModel& model, const LPSolution& solution);

struct SimplexOptions {
  double feasibility_tol = 1e-7;
  double optimality_tol = 1e-9;
  double pivot_tol = 1e-10;
  int refactor_interval = 100;
  int degenerate_switch = 1000;  // consecutive degenerate pivots before Bland's rule
  long iteration_cap = 0;        // 0: 50 * (rows + columns)
};

// Solver seam. The built-in simplex is the default implementation.
class LPBackend {
 public:
  virtual ~LPBackend() = default;
  virtual LPSolution solve(const LPModel& model) const = 0;
  virtual std::string name() const = 0;
};

class SimplexBackend final : public LPBackend {
 public:
  explicit SimplexBackend(SimplexOptions options = {}) : options_(options) {}
  LPSolution solve(const LPModel& model) const override;
  std::string name() const override { return "simplex"; }

 private:
  SimplexOptions options_;
};

LPSolution solve_lp(const LPModel& model, const SimplexOptions& options = {});

// CPLEX-style LP text: Maximize/Minimize, Subject To, Bounds, End.
void write_lp_text(const LPModel& model, std::ostream& out);
std::string to_lp_text(const LPModel& model);
LPModel read_lp_text(std::istream& in);

}  // namespace rsched
