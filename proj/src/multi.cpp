#include "robustprice/multi.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bisect.hpp"
#include "formulation.hpp"
#include "robustprice/cross.hpp"
#include "robustprice/error.hpp"

namespace robustprice {

namespace {

constexpr double kZeroRegretTarget = 1e-7;
constexpr double kVerifyTol = 1e-6;

void verify_witness(const Mechanism& phi, const UncertaintySet& set, const TripleTarget& t,
                    const RobustOptions& options) {
  const double rev = -worst_lambda_regret(phi, set, 0.0, options).value;
  const double reg = worst_lambda_regret(phi, set, 1.0, options).value;
  const double rat = worst_lambda_regret(phi, set, t.theta_ratio, options).value;
  if (rev < t.theta_revenue - kVerifyTol || reg > t.theta_regret + kVerifyTol || rat > kVerifyTol) {
    std::ostringstream msg;
    msg.precision(12);
    msg << "best-of-all witness fails re-verification: revenue " << rev << ", regret " << reg
        << ", ratio-regret " << rat;
    fail(ErrorCode::numerical_failure, msg.str());
  }
}

}  // namespace

TripleTarget scaled_target(const RobustSummary& summary, const ValueGrid& grid, double c) {
  if (!(c >= 0.0 && c <= 1.0)) fail(ErrorCode::invalid_input, "c must lie in [0,1]");
  TripleTarget t;
  t.theta_revenue = c * summary.theta_revenue;
  t.theta_ratio = c * summary.theta_ratio;
  if (summary.theta_regret <= 0.0) {
    t.theta_regret = kZeroRegretTarget;
  } else if (c == 0.0) {
    t.theta_regret = 10.0 * grid.upper();
  } else {
    t.theta_regret = summary.theta_regret / c;
  }
  return t;
}

namespace {

std::optional<Mechanism> solve_triple(const UncertaintySet& set, const TripleTarget& target,
                                      const RobustOptions& options, lp::WarmStart* warm) {
  if (!(target.theta_ratio >= 0.0 && target.theta_ratio <= 1.0)) {
    fail(ErrorCode::invalid_input, "ratio target must lie in [0,1]");
  }
  if (std::isnan(target.theta_regret) || target.theta_regret < 0.0) {
    fail(ErrorCode::invalid_input, "regret target must be nonnegative");
  }
  if (!std::isfinite(target.theta_revenue)) fail(ErrorCode::invalid_input, "revenue target must be finite");
  require_feasible(set, options.lp);
  lp::LpModel model;
  const detail::RevenueSource rev = detail::add_mechanism(model, set.grid());
  detail::add_lambda_block(model, set, 0.0, rev, -1, -target.theta_revenue);
  if (std::isfinite(target.theta_regret)) detail::add_lambda_block(model, set, 1.0, rev, -1, target.theta_regret);
  detail::add_lambda_block(model, set, target.theta_ratio, rev, -1, 0.0);
  const lp::LpSolution sol = detail::solve_checked(model, set, options.lp, "triple feasibility", warm);
  if (!sol.optimal()) return std::nullopt;
  return detail::read_mechanism(rev, set.grid(), sol);
}

}  // namespace

std::optional<Mechanism> check_triple(const UncertaintySet& set, const TripleTarget& target,
                                      const RobustOptions& options) {
  return solve_triple(set, target, options, nullptr);
}

BestOfAllResult best_of_all(const UncertaintySet& set, const RobustSummary& summary, const RobustOptions& options) {
  const ValueGrid& grid = set.grid();
  lp::WarmStart warm;
  const auto result = detail::bisect_unit<Mechanism>(
      [&](double c) { return solve_triple(set, scaled_target(summary, grid, c), options, &warm); }, options.eps,
      options.max_bisection);
  std::optional<Mechanism> mech = result.witness;
  int probes = result.probes;
  if (!mech) {
    mech = solve_triple(set, scaled_target(summary, grid, 0.0), options, &warm);
    ++probes;
    if (!mech) fail(ErrorCode::numerical_failure, "vacuous best-of-all targets reported infeasible");
  }
  verify_witness(*mech, set, scaled_target(summary, grid, result.lo), options);
  return BestOfAllResult{result.lo, *mech, summary, result.lo, result.hi, probes};
}

BestOfAllResult best_of_all(const UncertaintySet& set, const RobustOptions& options) {
  return best_of_all(set, robust_summary(set, options), options);
}

double AllCriteria::all() const { return std::min({revenue, regret, ratio}); }

AllCriteria relperf_all(const Mechanism& phi, const UncertaintySet& set, const RobustSummary& summary,
                        const RobustOptions& options) {
  AllCriteria out;
  out.revenue = relperf(worst_value(phi, set, CriterionSpec::revenue(), options), summary.theta_revenue,
                        CriterionSpec::revenue(), 1e-6, options.zero_tol);
  out.regret = relperf(worst_value(phi, set, CriterionSpec::regret(), options), summary.theta_regret,
                       CriterionSpec::regret(), 1e-6, options.zero_tol);
  out.ratio = relperf(worst_value(phi, set, CriterionSpec::ratio(), options), summary.theta_ratio,
                      CriterionSpec::ratio(), 1e-6, options.zero_tol);
  return out;
}

double relperf_all(const Mechanism& phi, const UncertaintySet& set, const RobustOptions& options) {
  return relperf_all(phi, set, robust_summary(set, options), options).all();
}

}  // namespace robustprice
