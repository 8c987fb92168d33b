#pragma once

// LP building blocks shared by the robust, cross and multi solvers.

#include <vector>

#include "robustprice/instance.hpp"
#include "robustprice/lp.hpp"
#include "robustprice/robust.hpp"

namespace robustprice::detail {

/// Revenue a buyer of value index v pays: either LP columns R_v tied to
/// mechanism columns phi_s, or constants for a fixed mechanism.
class RevenueSource {
 public:
  static RevenueSource fixed(const Mechanism& phi) { return RevenueSource(revenue_curve(phi), -1, -1); }

  bool is_fixed() const { return phi_col_ < 0; }
  int phi_col(int s) const { return phi_col_ + s; }
  int rev_col(int v) const { return rev_col_ + v; }
  double constant(int v) const { return constants_[v]; }

 private:
  friend RevenueSource add_mechanism(lp::LpModel& model, const ValueGrid& grid);
  RevenueSource(std::vector<double> constants, int phi_col, int rev_col)
      : constants_(std::move(constants)), phi_col_(phi_col), rev_col_(rev_col) {}

  std::vector<double> constants_;
  int phi_col_;
  int rev_col_;
};

/// Adds phi_s >= 0 with sum 1 and free R_v = R_{v-1} + g_v phi_v.
RevenueSource add_mechanism(lp::LpModel& model, const ValueGrid& grid);

/// Reads the mechanism columns out of an optimal solution.
Mechanism read_mechanism(const RevenueSource& source, const ValueGrid& grid, const lp::LpSolution& sol);

/// Columns of one lambda-regret block: dual multipliers y_k(p) (free) for
/// each price p in [p_begin, p_end).
struct LambdaBlock {
  int p_begin = 0;
  int p_end = 0;
  int first_col = 0;
  int per_price = 0;
  int col(int p, int k) const { return first_col + (p - p_begin) * per_price + k; }
};

/// Worst-case lambda-regret of the revenue source, in dual form. For each
/// price p in range:
///   sum_k y_k(p) t_k  <=  theta            (theta_col >= 0)
///                     <=  bound            (theta_col < 0)
///   lambda p 1(v >= p) - R_v - sum_k y_k(p) c_k(v) <= 0    for every v.
LambdaBlock add_lambda_block(lp::LpModel& model, const UncertaintySet& set, double lambda,
                             const RevenueSource& revenue, int theta_col, double bound, int p_begin,
                             int p_end);

inline LambdaBlock add_lambda_block(lp::LpModel& model, const UncertaintySet& set, double lambda,
                                    const RevenueSource& revenue, int theta_col, double bound) {
  return add_lambda_block(model, set, lambda, revenue, theta_col, bound, 0, set.grid().size());
}

/// Worst-case ratio >= r in dual form (mass multiplier eliminated):
///   R_v + sum_k y_k(p) (t_k - c_k(v)) - r p 1(v >= p) >= 0   for every v, p.
void add_ratio_block(lp::LpModel& model, const UncertaintySet& set, const RevenueSource& revenue, int r_col);

/// Splits the multipliers of `block` into moment and quantile parts.
void read_certificate(const LambdaBlock& block, const UncertaintySet& set, const lp::LpSolution& sol,
                      DualCertificate& cert);

/// Solves and maps infeasible/unbounded verdicts onto errors: an empty
/// uncertainty set surfaces as infeasible_set. `warm` as in lp::solve.
lp::LpSolution solve_checked(const lp::LpModel& model, const UncertaintySet& set, const lp::SolverOptions& options,
                             const char* what, lp::WarmStart* warm = nullptr);

}  // namespace robustprice::detail
