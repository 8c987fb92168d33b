#pragma once

#include <optional>

#include "robustprice/instance.hpp"
#include "robustprice/robust.hpp"

namespace robustprice {

/// Worst revenue at least theta_revenue, worst regret at most theta_regret,
/// worst ratio at least theta_ratio. An infinite regret cap drops that block.
struct TripleTarget {
  double theta_revenue = 0.0;
  double theta_regret = lp::kInf;
  double theta_ratio = 0.0;
};

/// The targets (c theta_rev, theta_reg / c, c theta_rat) with the edge
/// rules: regret cap 10 * upper at c = 0, and 1e-7 when theta_reg = 0.
TripleTarget scaled_target(const RobustSummary& summary, const ValueGrid& grid, double c);

/// A mechanism meeting all three targets, if one exists.
std::optional<Mechanism> check_triple(const UncertaintySet& set, const TripleTarget& target,
                                      const RobustOptions& options = {});

struct BestOfAllResult {
  double c_star = 0.0;
  Mechanism mech;
  RobustSummary summary;
  /// Final bisection bracket [lo, hi].
  double bracket_lo = 0.0;
  double bracket_hi = 1.0;
  int probes = 0;
};

/// Largest c for which one mechanism reaches fraction c of every focal
/// optimum, and that mechanism.
BestOfAllResult best_of_all(const UncertaintySet& set, const RobustSummary& summary, const RobustOptions& options = {});
BestOfAllResult best_of_all(const UncertaintySet& set, const RobustOptions& options = {});

struct AllCriteria {
  double revenue = 0.0;
  double regret = 0.0;
  double ratio = 0.0;
  double all() const;
};

/// Relative performance of `phi` under each focal criterion, each worst case
/// computed separately; the overall value is their minimum.
AllCriteria relperf_all(const Mechanism& phi, const UncertaintySet& set, const RobustSummary& summary,
                        const RobustOptions& options = {});
double relperf_all(const Mechanism& phi, const UncertaintySet& set, const RobustOptions& options = {});

}  // namespace robustprice
