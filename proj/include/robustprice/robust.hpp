#pragma once

#include <string>
#include <vector>

#include "robustprice/instance.hpp"
#include "robustprice/lp.hpp"

namespace robustprice {

/// Revenue, regret, ratio, or lambda-regret with an explicit lambda.
struct CriterionSpec {
  enum class Kind { revenue, regret, ratio, lambda_regret };

  Kind kind = Kind::revenue;
  double lambda = 0.0;  // only for lambda_regret

  static CriterionSpec revenue() { return {Kind::revenue, 0.0}; }
  static CriterionSpec regret() { return {Kind::regret, 1.0}; }
  static CriterionSpec ratio() { return {Kind::ratio, 0.0}; }
  static CriterionSpec lambda_regret(double lambda);

  /// "revenue", "regret", "ratio" or "lambda=<x>".
  static CriterionSpec parse(const std::string& text);
  std::string name() const;

  friend bool operator==(const CriterionSpec&, const CriterionSpec&) = default;
};

enum class RatioMethod { search, direct };

struct RobustOptions {
  lp::SolverOptions lp;
  /// Bracket width at which a lambda or c bisection stops.
  double eps = 1e-4;
  /// "R <= 0" is tested as R <= zero_tol.
  double zero_tol = 1e-7;
  int max_bisection = 30;
  RatioMethod ratio_method = RatioMethod::search;
};

/// Multipliers of the per-price programs: alpha[p][i] for moment i,
/// beta[p][j] for quantile j.
struct DualCertificate {
  std::vector<std::vector<double>> alpha;
  std::vector<std::vector<double>> beta;
  double theta = 0.0;
};

struct WorstRegret {
  double value = 0.0;
  DualCertificate certificate;
};

struct RobustMechanism {
  double value = 0.0;
  Mechanism mechanism;
  int lp_solves = 0;
};

/// Worst-case lambda-regret of a fixed mechanism, from the dual LP.
WorstRegret worst_lambda_regret(const Mechanism& phi, const UncertaintySet& set, double lambda,
                                const RobustOptions& options = {});

/// Best worst-case lambda-regret over all mechanisms and a mechanism attaining it.
RobustMechanism minimax_lambda_regret(const UncertaintySet& set, double lambda, const RobustOptions& options = {});

RobustMechanism maximin_revenue(const UncertaintySet& set, const RobustOptions& options = {});
RobustMechanism minimax_regret(const UncertaintySet& set, const RobustOptions& options = {});
/// Largest lambda in [0,1] with minimax lambda-regret <= zero_tol, by bisection.
RobustMechanism maximin_ratio_search(const UncertaintySet& set, const RobustOptions& options = {});
/// Maximin ratio from a single LP.
RobustMechanism maximin_ratio_direct(const UncertaintySet& set, const RobustOptions& options = {});
/// Dispatches on options.ratio_method.
RobustMechanism maximin_ratio(const UncertaintySet& set, const RobustOptions& options = {});

/// Worst-case ratio of a fixed mechanism. Uses the same method and bracket
/// rule as maximin_ratio so the two are directly comparable.
double worst_ratio(const Mechanism& phi, const UncertaintySet& set, const RobustOptions& options = {});

/// Worst case of `criterion` in natural units: minimum revenue, maximum
/// regret, minimum ratio, or maximum lambda-regret.
double worst_value(const Mechanism& phi, const UncertaintySet& set, const CriterionSpec& criterion,
                   const RobustOptions& options = {});

struct RobustSummary {
  double theta_revenue = 0.0;
  double theta_regret = 0.0;
  double theta_ratio = 0.0;
  Mechanism mech_revenue;
  Mechanism mech_regret;
  Mechanism mech_ratio;
  double eps = 0.0;
  RatioMethod ratio_method = RatioMethod::search;
  int lp_solves = 0;

  /// Optimal value for revenue, regret or ratio.
  double theta(CriterionSpec::Kind kind) const;
  const Mechanism& mechanism(CriterionSpec::Kind kind) const;
};

/// The three optimal robust values and mechanisms of one uncertainty set.
RobustSummary robust_summary(const UncertaintySet& set, const RobustOptions& options = {});

}  // namespace robustprice
