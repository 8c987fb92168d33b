#include "robustprice/robust.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bisect.hpp"
#include "formulation.hpp"
#include "robustprice/error.hpp"

namespace robustprice {

CriterionSpec CriterionSpec::lambda_regret(double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) fail(ErrorCode::invalid_input, "lambda must lie in [0,1]");
  return {Kind::lambda_regret, lambda};
}

CriterionSpec CriterionSpec::parse(const std::string& text) {
  if (text == "revenue") return revenue();
  if (text == "regret") return regret();
  if (text == "ratio") return ratio();
  if (text.rfind("lambda=", 0) == 0) {
    const std::string num = text.substr(7);
    std::size_t used = 0;
    double lambda = 0.0;
    try {
      lambda = std::stod(num, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != num.size()) fail(ErrorCode::invalid_input, "criterion: bad lambda in '" + text + "'");
    return lambda_regret(lambda);
  }
  fail(ErrorCode::invalid_input, "criterion: expected revenue, regret, ratio or lambda=<x>, got '" + text + "'");
}

std::string CriterionSpec::name() const {
  switch (kind) {
    case Kind::revenue: return "revenue";
    case Kind::regret: return "regret";
    case Kind::ratio: return "ratio";
    case Kind::lambda_regret: {
      std::ostringstream out;
      out.precision(12);
      out << "lambda=" << lambda;
      return out.str();
    }
  }
  return "revenue";
}

namespace {

void check_lambda(double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) fail(ErrorCode::invalid_input, "lambda must lie in [0,1]");
}

void check_grid(const Mechanism& phi, const UncertaintySet& set) {
  if (!(phi.grid() == set.grid())) fail(ErrorCode::invalid_input, "mechanism is not on the uncertainty set's grid");
}

RobustMechanism solve_minimax(const UncertaintySet& set, double lambda, const RobustOptions& options,
                              lp::WarmStart* warm = nullptr) {
  lp::LpModel model;
  const detail::RevenueSource rev = detail::add_mechanism(model, set.grid());
  const int theta = model.add_variable(-lp::kInf, lp::kInf, 1.0);
  detail::add_lambda_block(model, set, lambda, rev, theta, 0.0);
  const lp::LpSolution sol = detail::solve_checked(model, set, options.lp, "minimax lambda-regret", warm);
  if (!sol.optimal()) fail(ErrorCode::numerical_failure, "minimax lambda-regret LP reported infeasible");
  return {sol.values[theta], detail::read_mechanism(rev, set.grid(), sol), 1};
}

RobustMechanism ratio_search(const UncertaintySet& set, const RobustOptions& options,
                             const RobustMechanism* at_zero, lp::WarmStart* warm = nullptr) {
  // Probes differ only in right-hand sides, so each restarts from the last basis.
  lp::WarmStart local;
  if (!warm) warm = &local;
  int solves = 0;
  const auto result = detail::bisect_unit<Mechanism>(
      [&](double lambda) -> std::optional<Mechanism> {
        RobustMechanism r = solve_minimax(set, lambda, options, warm);
        ++solves;
        if (r.value <= options.zero_tol) return std::move(r.mechanism);
        return std::nullopt;
      },
      options.eps, options.max_bisection);
  if (result.witness) return {result.lo, *result.witness, solves};
  // Every probe failed: fall back to the revenue-optimal mechanism, whose
  // worst ratio is at least 0.
  if (at_zero) return {0.0, at_zero->mechanism, solves};
  RobustMechanism zero = solve_minimax(set, 0.0, options);
  return {0.0, zero.mechanism, solves + 1};
}

// The fixed-mechanism LP separates by price: theta = max_p theta_p, where
// theta_p is the optimum of price p's block alone.
WorstRegret worst_by_price(const Mechanism& phi, const UncertaintySet& set, double lambda,
                           const RobustOptions& options) {
  const detail::RevenueSource rev = detail::RevenueSource::fixed(phi);
  WorstRegret out;
  out.value = -lp::kInf;
  for (int p = 0; p < set.grid().size(); ++p) {
    lp::LpModel model;
    const int theta = model.add_variable(-lp::kInf, lp::kInf, 1.0);
    const detail::LambdaBlock block = detail::add_lambda_block(model, set, lambda, rev, theta, 0.0, p, p + 1);
    const lp::LpSolution sol = detail::solve_checked(model, set, options.lp, "worst lambda-regret");
    if (!sol.optimal()) fail(ErrorCode::numerical_failure, "worst lambda-regret LP reported infeasible");
    detail::read_certificate(block, set, sol, out.certificate);
    out.value = std::max(out.value, sol.values[theta]);
  }
  out.certificate.theta = out.value;
  return out;
}

double worst_ratio_direct(const Mechanism& phi, const UncertaintySet& set, const RobustOptions& options) {
  lp::LpModel model;
  model.set_sense(lp::Sense::maximize);
  const int r = model.add_variable(0.0, 1.0, 1.0);
  detail::add_ratio_block(model, set, detail::RevenueSource::fixed(phi), r);
  const lp::LpSolution sol = detail::solve_checked(model, set, options.lp, "worst ratio");
  if (!sol.optimal()) fail(ErrorCode::numerical_failure, "worst ratio LP reported infeasible");
  return sol.values[r];
}

}  // namespace

WorstRegret worst_lambda_regret(const Mechanism& phi, const UncertaintySet& set, double lambda,
                                const RobustOptions& options) {
  check_lambda(lambda);
  check_grid(phi, set);
  require_feasible(set, options.lp);
  return worst_by_price(phi, set, lambda, options);
}

RobustMechanism minimax_lambda_regret(const UncertaintySet& set, double lambda, const RobustOptions& options) {
  check_lambda(lambda);
  require_feasible(set, options.lp);
  return solve_minimax(set, lambda, options);
}

RobustMechanism maximin_revenue(const UncertaintySet& set, const RobustOptions& options) {
  RobustMechanism r = minimax_lambda_regret(set, 0.0, options);
  r.value = -r.value;
  return r;
}

RobustMechanism minimax_regret(const UncertaintySet& set, const RobustOptions& options) {
  return minimax_lambda_regret(set, 1.0, options);
}

RobustMechanism maximin_ratio_search(const UncertaintySet& set, const RobustOptions& options) {
  require_feasible(set, options.lp);
  return ratio_search(set, options, nullptr);
}

RobustMechanism maximin_ratio_direct(const UncertaintySet& set, const RobustOptions& options) {
  require_feasible(set, options.lp);
  lp::LpModel model;
  model.set_sense(lp::Sense::maximize);
  const detail::RevenueSource rev = detail::add_mechanism(model, set.grid());
  // The ratio never exceeds 1; the cap also keeps the LP bounded when
  // Nature can only put all mass on value 0.
  const int r = model.add_variable(0.0, 1.0, 1.0);
  detail::add_ratio_block(model, set, rev, r);
  const lp::LpSolution sol = detail::solve_checked(model, set, options.lp, "maximin ratio");
  if (!sol.optimal()) fail(ErrorCode::numerical_failure, "maximin ratio LP reported infeasible");
  return {sol.values[r], detail::read_mechanism(rev, set.grid(), sol), 1};
}

RobustMechanism maximin_ratio(const UncertaintySet& set, const RobustOptions& options) {
  return options.ratio_method == RatioMethod::direct ? maximin_ratio_direct(set, options)
                                                     : maximin_ratio_search(set, options);
}

double worst_ratio(const Mechanism& phi, const UncertaintySet& set, const RobustOptions& options) {
  check_grid(phi, set);
  require_feasible(set, options.lp);
  if (options.ratio_method == RatioMethod::direct) return worst_ratio_direct(phi, set, options);
  const auto result = detail::bisect_unit<bool>(
      [&](double lambda) -> std::optional<bool> {
        if (worst_by_price(phi, set, lambda, options).value <= options.zero_tol) return true;
        return std::nullopt;
      },
      options.eps, options.max_bisection);
  return result.lo;
}

double worst_value(const Mechanism& phi, const UncertaintySet& set, const CriterionSpec& criterion,
                   const RobustOptions& options) {
  switch (criterion.kind) {
    case CriterionSpec::Kind::revenue: return -worst_lambda_regret(phi, set, 0.0, options).value;
    case CriterionSpec::Kind::regret: return worst_lambda_regret(phi, set, 1.0, options).value;
    case CriterionSpec::Kind::ratio: return worst_ratio(phi, set, options);
    case CriterionSpec::Kind::lambda_regret: return worst_lambda_regret(phi, set, criterion.lambda, options).value;
  }
  fail(ErrorCode::invalid_input, "unknown criterion");
}

double RobustSummary::theta(CriterionSpec::Kind kind) const {
  switch (kind) {
    case CriterionSpec::Kind::revenue: return theta_revenue;
    case CriterionSpec::Kind::regret: return theta_regret;
    case CriterionSpec::Kind::ratio: return theta_ratio;
    case CriterionSpec::Kind::lambda_regret: break;
  }
  fail(ErrorCode::invalid_input, "summary holds no optimum for a general lambda-regret");
}

const Mechanism& RobustSummary::mechanism(CriterionSpec::Kind kind) const {
  switch (kind) {
    case CriterionSpec::Kind::revenue: return mech_revenue;
    case CriterionSpec::Kind::regret: return mech_regret;
    case CriterionSpec::Kind::ratio: return mech_ratio;
    case CriterionSpec::Kind::lambda_regret: break;
  }
  fail(ErrorCode::invalid_input, "summary holds no mechanism for a general lambda-regret");
}

RobustSummary robust_summary(const UncertaintySet& set, const RobustOptions& options) {
  require_feasible(set, options.lp);
  lp::WarmStart warm;
  const RobustMechanism rev = solve_minimax(set, 0.0, options, &warm);
  const RobustMechanism reg = solve_minimax(set, 1.0, options, &warm);
  const RobustMechanism rat = options.ratio_method == RatioMethod::direct ? maximin_ratio_direct(set, options)
                                                                          : ratio_search(set, options, &rev, &warm);
  return RobustSummary{
      .theta_revenue = -rev.value,
      .theta_regret = reg.value,
      .theta_ratio = rat.value,
      .mech_revenue = rev.mechanism,
      .mech_regret = reg.mechanism,
      .mech_ratio = rat.mechanism,
      .eps = options.eps,
      .ratio_method = options.ratio_method,
      .lp_solves = rev.lp_solves + reg.lp_solves + rat.lp_solves,
  };
}

}  // namespace robustprice
