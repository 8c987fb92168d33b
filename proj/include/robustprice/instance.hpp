#pragma once

#include <optional>
#include <string>
#include <vector>

#include "robustprice/lp.hpp"

namespace robustprice {

/// Strictly increasing, finite, nonnegative set of admissible values. Prices
/// and buyer values live on the same grid.
class ValueGrid {
 public:
  /// Validates and wraps an explicit point list.
  static ValueGrid from_points(std::vector<double> points);

  const std::vector<double>& points() const { return points_; }
  double operator[](int i) const { return points_[i]; }
  int size() const { return static_cast<int>(points_.size()); }
  int steps() const { return size() - 1; }
  double lower() const { return points_.front(); }
  double upper() const { return points_.back(); }

  /// Index of the grid point closest to `x` (ties go to the lower point).
  int nearest(double x) const;

  friend bool operator==(const ValueGrid&, const ValueGrid&) = default;

 private:
  explicit ValueGrid(std::vector<double> points) : points_(std::move(points)) {}
  std::vector<double> points_;
};

/// Points a + i (b - a) / K for i = 0..K.
ValueGrid make_grid(double a, double b, int K);

struct MomentConstraint {
  int order = 0;
  double value = 0.0;
};

/// Tail constraint P(v >= location) = prob. `index` is the grid position
/// the location was snapped to.
struct QuantileConstraint {
  double location = 0.0;
  double prob = 0.0;
  int index = 0;
};

enum class FamilyKind { mean, mean_var, median, lower_bound, general };

const char* to_string(FamilyKind kind);
FamilyKind family_from_string(const std::string& name);

struct FamilyTag {
  FamilyKind kind = FamilyKind::general;
  std::vector<double> params;

  /// "mean(0.3)", "mean_var(0.5,0.2)", "general".
  std::string label() const;
};

/// All distributions on the grid matching the moment and tail constraints.
/// Construction validates shape only; emptiness is decided by check_feasible.
class UncertaintySet {
 public:
  /// Adds the order-0 moment if missing, snaps quantile locations to the
  /// grid. Throws Error(invalid_input) on malformed data.
  UncertaintySet(ValueGrid grid, std::vector<MomentConstraint> moments,
                 std::vector<QuantileConstraint> quantiles, FamilyTag tag = {});

  const ValueGrid& grid() const { return grid_; }
  const std::vector<MomentConstraint>& moments() const { return moments_; }
  const std::vector<QuantileConstraint>& quantiles() const { return quantiles_; }
  const FamilyTag& tag() const { return tag_; }

  /// Number of dual multipliers per price: one per moment, one per quantile.
  int num_constraints() const { return static_cast<int>(moments_.size() + quantiles_.size()); }

  /// Coefficient of constraint k at grid value index v: v^i for moments,
  /// 1(v >= r_j) for quantiles.
  double coefficient(int k, int v) const;
  /// Right-hand side of constraint k: m_i or q_j.
  double target(int k) const;

 private:
  ValueGrid grid_;
  std::vector<MomentConstraint> moments_;
  std::vector<QuantileConstraint> quantiles_;
  FamilyTag tag_;
};

/// Builds one of the named families. Parameters must lie in (0, 1).
UncertaintySet make_family(const FamilyTag& tag, int K);

/// Probability weights over a grid. The Tag parameter keeps buyer value
/// distributions and seller price distributions apart.
template <class Tag>
class Weights {
 public:
  /// Throws Error(invalid_input) on a size mismatch, negative or non-finite
  /// weights, or a sum off 1 by more than 1e-9.
  Weights(ValueGrid grid, std::vector<double> weights);

  const ValueGrid& grid() const { return grid_; }
  const std::vector<double>& weights() const { return weights_; }
  double operator[](int i) const { return weights_[i]; }
  int size() const { return static_cast<int>(weights_.size()); }

  /// Running sums, last entry 1 up to rounding.
  std::vector<double> cdf() const;

  static Weights point_mass(ValueGrid grid, int index);

 private:
  ValueGrid grid_;
  std::vector<double> weights_;
};

struct DistributionTag {};
struct MechanismTag {};
/// Nature's value distribution F.
using Distribution = Weights<DistributionTag>;
/// The seller's randomized posted price Φ.
using Mechanism = Weights<MechanismTag>;

extern template class Weights<DistributionTag>;
extern template class Weights<MechanismTag>;

/// Drops tiny negative entries and rescales LP output onto the simplex.
/// Only for solver output, never for user input.
std::vector<double> clean_simplex_weights(std::vector<double> raw);

/// True iff some distribution on the grid satisfies every constraint.
bool check_feasible(const UncertaintySet& set, const lp::SolverOptions& options = {});
/// Throws Error(infeasible_set) unless check_feasible.
void require_feasible(const UncertaintySet& set, const lp::SolverOptions& options = {});

/// max_p p * P(v >= p) over grid prices.
double opt_revenue(const Distribution& f);
/// Expected revenue: sum_v F(v) sum_{s <= v} s Phi(s).
double revenue(const Mechanism& phi, const Distribution& f);
double regret(const Mechanism& phi, const Distribution& f);
/// revenue / OPT, and 1 when OPT = 0.
double ratio(const Mechanism& phi, const Distribution& f);
/// lambda * OPT(F) - revenue(Phi, F).
double lambda_regret(const Mechanism& phi, const Distribution& f, double lambda);

/// Revenue collected from a buyer of value index v: sum_{s <= v} s Phi(s).
std::vector<double> revenue_curve(const Mechanism& phi);

struct WorstCase {
  double value = 0.0;
  Distribution worst;
};

/// Nature's best response, solved over distributions one price at a time:
/// max over p of max_F [lambda p P(v >= p) - revenue(Phi, F)].
/// Independent of the dual formulation used by the robust solvers.
WorstCase worst_case_certificate(const Mechanism& phi, const UncertaintySet& set, double lambda,
                                 const lp::SolverOptions& options = {});

}  // namespace robustprice
