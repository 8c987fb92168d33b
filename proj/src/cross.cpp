#include "robustprice/cross.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bisect.hpp"
#include "formulation.hpp"
#include "robustprice/error.hpp"

namespace robustprice {

namespace {

void require_focal(const CriterionSpec& c, const char* role) {
  if (c.kind == CriterionSpec::Kind::lambda_regret) {
    fail(ErrorCode::invalid_input, std::string(role) + " criterion must be revenue, regret or ratio");
  }
}

[[noreturn]] void old_infeasible(const OldCriterionConstraint& old) {
  std::ostringstream msg;
  msg.precision(12);
  msg << "no mechanism has worst " << old.lambda_old << "-regret <= " << old.bound();
  fail(ErrorCode::old_constraint_infeasible, msg.str());
}

}  // namespace

OldCriterionConstraint OldCriterionConstraint::from_summary(const CriterionSpec& old, const RobustSummary& summary) {
  OldCriterionConstraint c;
  switch (old.kind) {
    case CriterionSpec::Kind::revenue:
      c.lambda_old = 0.0;
      c.r_old = -summary.theta_revenue;
      break;
    case CriterionSpec::Kind::regret:
      c.lambda_old = 1.0;
      c.r_old = summary.theta_regret;
      break;
    case CriterionSpec::Kind::ratio:
      c.lambda_old = summary.theta_ratio;
      c.r_old = 0.0;
      break;
    case CriterionSpec::Kind::lambda_regret:
      require_focal(old, "old");
  }
  c.slack = std::max(1e-7, 1e-6 * std::abs(c.r_old));
  return c;
}

CrossValue cross_regret(const UncertaintySet& set, const OldCriterionConstraint& old, double lambda_new,
                        const RobustOptions& options, lp::WarmStart* warm) {
  if (!(lambda_new >= 0.0 && lambda_new <= 1.0)) fail(ErrorCode::invalid_input, "lambda_new must lie in [0,1]");
  if (!(old.lambda_old >= 0.0 && old.lambda_old <= 1.0)) fail(ErrorCode::invalid_input, "lambda_old must lie in [0,1]");
  require_feasible(set, options.lp);
  lp::LpModel model;
  const detail::RevenueSource rev = detail::add_mechanism(model, set.grid());
  const int theta = model.add_variable(-lp::kInf, lp::kInf, 1.0);
  detail::add_lambda_block(model, set, lambda_new, rev, theta, 0.0);
  detail::add_lambda_block(model, set, old.lambda_old, rev, -1, old.bound());
  const lp::LpSolution sol = detail::solve_checked(model, set, options.lp, "cross regret", warm);
  if (!sol.optimal()) old_infeasible(old);
  return {sol.values[theta], detail::read_mechanism(rev, set.grid(), sol)};
}

CrossValue cross_ratio_direct(const UncertaintySet& set, const OldCriterionConstraint& old,
                              const RobustOptions& options) {
  require_feasible(set, options.lp);
  lp::LpModel model;
  model.set_sense(lp::Sense::maximize);
  const detail::RevenueSource rev = detail::add_mechanism(model, set.grid());
  const int r = model.add_variable(0.0, 1.0, 1.0);
  detail::add_ratio_block(model, set, rev, r);
  detail::add_lambda_block(model, set, old.lambda_old, rev, -1, old.bound());
  const lp::LpSolution sol = detail::solve_checked(model, set, options.lp, "cross ratio");
  if (!sol.optimal()) old_infeasible(old);
  return {sol.values[r], detail::read_mechanism(rev, set.grid(), sol)};
}

CrossValue cross_ratio(const UncertaintySet& set, const OldCriterionConstraint& old, const RobustOptions& options,
                       lp::WarmStart* warm) {
  if (options.ratio_method == RatioMethod::direct) return cross_ratio_direct(set, old, options);
  // Probes differ only in right-hand sides, so each restarts from the last basis.
  lp::WarmStart local;
  if (!warm) warm = &local;
  const auto result = detail::bisect_unit<Mechanism>(
      [&](double lambda) -> std::optional<Mechanism> {
        CrossValue v = cross_regret(set, old, lambda, options, warm);
        if (v.value <= options.zero_tol) return std::move(v.witness);
        return std::nullopt;
      },
      options.eps, options.max_bisection);
  if (result.witness) return {result.lo, *result.witness};
  // Worst-case revenue is never negative, so lambda = 0 always passes.
  return {0.0, cross_regret(set, old, 0.0, options, warm).witness};
}

double relperf(double raw, double theta_star, const CriterionSpec& criterion, double tolerance, double zero_tol) {
  double value = 0.0;
  switch (criterion.kind) {
    case CriterionSpec::Kind::revenue:
    case CriterionSpec::Kind::ratio:
      // theta = 0 means no mechanism guarantees anything: every one is optimal.
      value = theta_star <= zero_tol ? 1.0 : raw / theta_star;
      break;
    case CriterionSpec::Kind::regret:
      if (theta_star <= zero_tol) {
        value = raw <= zero_tol ? 1.0 : 0.0;
      } else {
        value = raw <= 0.0 ? lp::kInf : theta_star / raw;
      }
      break;
    case CriterionSpec::Kind::lambda_regret:
      require_focal(criterion, "evaluated");
  }
  if (value > 1.0 + tolerance || value < -tolerance) {
    std::ostringstream msg;
    msg.precision(12);
    msg << criterion.name() << " value " << raw << " is inconsistent with the optimum " << theta_star;
    fail(ErrorCode::inconsistent_inputs, msg.str());
  }
  return std::clamp(value, 0.0, 1.0);
}

CrossResult cross_performance(const UncertaintySet& set, const RobustSummary& summary, const CriterionSpec& old,
                              const CriterionSpec& next, const RobustOptions& options, lp::WarmStart* warm) {
  require_focal(old, "old");
  require_focal(next, "new");
  const OldCriterionConstraint constraint = OldCriterionConstraint::from_summary(old, summary);
  CrossValue v = next.kind == CriterionSpec::Kind::ratio
                     ? cross_ratio(set, constraint, options, warm)
                     : cross_regret(set, constraint, next.kind == CriterionSpec::Kind::regret ? 1.0 : 0.0, options, warm);
  const double raw = next.kind == CriterionSpec::Kind::revenue ? -v.value : v.value;
  const double rp = relperf(raw, summary.theta(next.kind), next, 1e-6, options.zero_tol);
  return CrossResult{old, next, raw, rp, std::move(v.witness)};
}

CrossResult cross_performance(const UncertaintySet& set, const CriterionSpec& old, const CriterionSpec& next,
                              const RobustOptions& options) {
  return cross_performance(set, robust_summary(set, options), old, next, options);
}

}  // namespace robustprice
