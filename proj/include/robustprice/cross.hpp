#pragma once

#include "robustprice/instance.hpp"
#include "robustprice/robust.hpp"

namespace robustprice {

/// The set of mechanisms optimal for an old criterion, written as a bound
/// on one worst-case lambda-regret: {Phi : R^Phi_lambda_old <= r_old + slack}.
struct OldCriterionConstraint {
  double lambda_old = 0.0;
  double r_old = 0.0;
  double slack = 0.0;

  /// revenue -> (0, -theta), regret -> (1, theta), ratio -> (theta, 0),
  /// with slack max(1e-7, 1e-6 |r_old|).
  static OldCriterionConstraint from_summary(const CriterionSpec& old, const RobustSummary& summary);

  double bound() const { return r_old + slack; }
};

struct CrossValue {
  double value = 0.0;
  Mechanism witness;
};

/// min over mechanisms meeting `old` of the worst-case lambda_new-regret.
/// Throws Error(old_constraint_infeasible) when no mechanism meets `old`.
/// All cross LPs of one set share a shape, so `warm` may carry a basis
/// across calls.
CrossValue cross_regret(const UncertaintySet& set, const OldCriterionConstraint& old, double lambda_new,
                        const RobustOptions& options = {}, lp::WarmStart* warm = nullptr);

/// Best worst-case ratio among mechanisms meeting `old`: bisection on
/// lambda_new, or a single LP for RatioMethod::direct.
CrossValue cross_ratio(const UncertaintySet& set, const OldCriterionConstraint& old, const RobustOptions& options = {},
                       lp::WarmStart* warm = nullptr);
CrossValue cross_ratio_direct(const UncertaintySet& set, const OldCriterionConstraint& old,
                              const RobustOptions& options = {});

struct CrossResult {
  CriterionSpec old_criterion;
  CriterionSpec new_criterion;
  /// Worst revenue, worst regret or worst ratio of the best old-optimal mechanism.
  double raw_value = 0.0;
  double relperf = 0.0;
  Mechanism witness;
};

/// How well the best mechanism optimal for `old` does under `next`.
CrossResult cross_performance(const UncertaintySet& set, const RobustSummary& summary, const CriterionSpec& old,
                              const CriterionSpec& next, const RobustOptions& options = {},
                              lp::WarmStart* warm = nullptr);
CrossResult cross_performance(const UncertaintySet& set, const CriterionSpec& old, const CriterionSpec& next,
                              const RobustOptions& options = {});

/// Relative performance: raw / theta for revenue and ratio, theta / raw for
/// regret. Values outside [0,1] by more than `tolerance` are inconsistent.
double relperf(double raw, double theta_star, const CriterionSpec& criterion, double tolerance = 1e-6,
               double zero_tol = 1e-7);

}  // namespace robustprice
