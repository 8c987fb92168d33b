#pragma once

#include <limits>
#include <string>
#include <vector>

namespace robustprice::lp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Sense { minimize, maximize };
enum class Relation { less_equal, equal, greater_equal };

struct Term {
  int var;
  double coef;
};

struct Constraint {
  std::vector<Term> terms;
  Relation relation = Relation::less_equal;
  double rhs = 0.0;
};

/// A finite linear program: linear objective, sparse rows and per-variable
/// bounds. Variables default to free.
class LpModel {
 public:
  LpModel() = default;

  int add_variable(double lower = -kInf, double upper = kInf, double cost = 0.0);
  int add_variables(int count, double lower = -kInf, double upper = kInf);

  /// Appends a row. Throws Error(invalid_input) on out-of-range indices or
  /// non-finite coefficients.
  int add_constraint(std::vector<Term> terms, Relation relation, double rhs);

  void set_sense(Sense sense) { sense_ = sense; }
  void set_cost(int var, double cost);
  void set_bounds(int var, double lower, double upper);

  int num_vars() const { return static_cast<int>(lower_.size()); }
  int num_constraints() const { return static_cast<int>(rows_.size()); }
  Sense sense() const { return sense_; }
  const std::vector<double>& costs() const { return cost_; }
  const std::vector<double>& lower() const { return lower_; }
  const std::vector<double>& upper() const { return upper_; }
  const std::vector<Constraint>& constraints() const { return rows_; }
  std::size_t num_nonzeros() const;

  /// Objective value of `x` (no feasibility check).
  double objective_value(const std::vector<double>& x) const;

  /// Largest absolute violation of any row or bound by `x`.
  double max_violation(const std::vector<double>& x) const;

  /// CPLEX-LP style text, one constraint per line, variables named v0..vN.
  std::string to_lp_format() const;

 private:
  void check_var(int var) const;

  Sense sense_ = Sense::minimize;
  std::vector<double> cost_;
  std::vector<double> lower_;
  std::vector<double> upper_;
  std::vector<Constraint> rows_;
};

enum class Status { optimal, infeasible, unbounded };

const char* to_string(Status status);

struct SolverOptions {
  double feasibility_tol = 1e-7;
  double optimality_tol = 1e-7;
  int max_iterations = 200000;
  /// Refactorize the basis after this many updates.
  int refactor_interval = 64;
  /// Solve the dual when rows exceed `dualize_ratio` times the columns.
  double dualize_ratio = 1.5;
  bool allow_dualize = true;
};

struct SolverMeta {
  int iterations = 0;
  double seconds = 0.0;
  bool dualized = false;
};

struct LpSolution {
  Status status = Status::infeasible;
  double objective = 0.0;
  /// Primal values, one per model variable (empty unless optimal).
  std::vector<double> values;
  /// Row multipliers in the model's own sense: d objective / d rhs.
  std::vector<double> duals;
  SolverMeta meta;

  bool optimal() const { return status == Status::optimal; }
};

/// Final simplex basis of one solve. Passing it back for a model of the same
/// shape (only bounds, costs or right-hand sides changed) restarts from it.
struct WarmStart {
  int rows = -1;
  int cols = -1;
  bool dualized = false;
  std::vector<int> heads;
  std::vector<unsigned char> state;
};

/// Solves `model`. Returns optimal / infeasible / unbounded; throws
/// Error(numerical_failure) when the simplex cannot certify any of those.
/// A non-null `warm` is used as the starting basis when it fits and is
/// overwritten with the final one.
LpSolution solve(const LpModel& model, const SolverOptions& options = {}, WarmStart* warm = nullptr);

/// Solves `model` with its objective zeroed; `optimal` means feasible.
LpSolution solve_feasibility(const LpModel& model, const SolverOptions& options = {});

}  // namespace robustprice::lp
