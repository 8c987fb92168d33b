#include "robustprice/instance.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "robustprice/error.hpp"

namespace robustprice {

namespace {

constexpr double kSumTol = 1e-9;
constexpr double kSnapSlack = 1e-12;

double power(double v, int order) {
  // 0^0 = 1 so the order-0 row is the total-mass constraint.
  return order == 0 ? 1.0 : std::pow(v, order);
}

}  // namespace

ValueGrid ValueGrid::from_points(std::vector<double> points) {
  if (points.empty()) fail(ErrorCode::invalid_input, "grid: no points");
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!std::isfinite(points[i]) || points[i] < 0.0) {
      fail(ErrorCode::invalid_input, "grid: point " + std::to_string(i) + " is negative or non-finite");
    }
    if (i > 0 && !(points[i] > points[i - 1])) {
      fail(ErrorCode::invalid_input, "grid: points must be strictly increasing at index " + std::to_string(i));
    }
  }
  return ValueGrid(std::move(points));
}

int ValueGrid::nearest(double x) const {
  const auto it = std::lower_bound(points_.begin(), points_.end(), x);
  if (it == points_.begin()) return 0;
  if (it == points_.end()) return size() - 1;
  const int hi = static_cast<int>(it - points_.begin());
  return (points_[hi] - x < x - points_[hi - 1]) ? hi : hi - 1;
}

ValueGrid make_grid(double a, double b, int K) {
  if (!std::isfinite(a) || !std::isfinite(b) || a < 0.0 || a >= b) {
    fail(ErrorCode::invalid_input, "grid: need 0 <= a < b");
  }
  if (K < 1) fail(ErrorCode::invalid_input, "grid: K must be at least 1");
  std::vector<double> points(K + 1);
  for (int i = 0; i <= K; ++i) points[i] = a + i * (b - a) / K;
  points[K] = b;
  return ValueGrid::from_points(std::move(points));
}

const char* to_string(FamilyKind kind) {
  switch (kind) {
    case FamilyKind::mean: return "mean";
    case FamilyKind::mean_var: return "mean_var";
    case FamilyKind::median: return "median";
    case FamilyKind::lower_bound: return "lower_bound";
    case FamilyKind::general: return "general";
  }
  return "general";
}

FamilyKind family_from_string(const std::string& name) {
  for (FamilyKind kind : {FamilyKind::mean, FamilyKind::mean_var, FamilyKind::median,
                          FamilyKind::lower_bound, FamilyKind::general}) {
    if (name == to_string(kind)) return kind;
  }
  fail(ErrorCode::invalid_input, "unknown family '" + name + "'");
}

std::string FamilyTag::label() const {
  std::ostringstream out;
  out << to_string(kind);
  if (!params.empty()) {
    out << '(';
    for (std::size_t i = 0; i < params.size(); ++i) out << (i ? "," : "") << params[i];
    out << ')';
  }
  return out.str();
}

UncertaintySet::UncertaintySet(ValueGrid grid, std::vector<MomentConstraint> moments,
                               std::vector<QuantileConstraint> quantiles, FamilyTag tag)
    : grid_(std::move(grid)), moments_(std::move(moments)), quantiles_(std::move(quantiles)), tag_(std::move(tag)) {
  bool has_mass = false;
  for (std::size_t k = 0; k < moments_.size(); ++k) {
    const MomentConstraint& m = moments_[k];
    if (m.order < 0) fail(ErrorCode::invalid_input, "moments[" + std::to_string(k) + "].order must be >= 0");
    if (!std::isfinite(m.value)) fail(ErrorCode::invalid_input, "moments[" + std::to_string(k) + "].value not finite");
    for (std::size_t l = 0; l < k; ++l) {
      if (moments_[l].order == m.order) {
        fail(ErrorCode::invalid_input, "moments: order " + std::to_string(m.order) + " repeated");
      }
    }
    if (m.order == 0) {
      if (m.value != 1.0) fail(ErrorCode::invalid_input, "moments: order 0 must have value 1");
      has_mass = true;
    }
  }
  if (!has_mass) moments_.insert(moments_.begin(), MomentConstraint{0, 1.0});
  std::stable_sort(moments_.begin(), moments_.end(),
                   [](const MomentConstraint& x, const MomentConstraint& y) { return x.order < y.order; });

  const auto& pts = grid_.points();
  for (std::size_t j = 0; j < quantiles_.size(); ++j) {
    QuantileConstraint& q = quantiles_[j];
    const std::string where = "quantiles[" + std::to_string(j) + "]";
    if (!std::isfinite(q.location)) fail(ErrorCode::invalid_input, where + ".location not finite");
    if (!(q.prob >= 0.0 && q.prob <= 1.0)) fail(ErrorCode::invalid_input, where + ".prob outside [0,1]");
    const int i = grid_.nearest(q.location);
    // Allowed distance: half the gap on the side of the location.
    double half = 0.0;
    if (grid_.size() > 1) {
      if (q.location >= pts[i]) {
        half = 0.5 * (i + 1 < grid_.size() ? pts[i + 1] - pts[i] : pts[i] - pts[i - 1]);
      } else {
        half = 0.5 * (i > 0 ? pts[i] - pts[i - 1] : pts[i + 1] - pts[i]);
      }
    }
    if (std::abs(q.location - pts[i]) > half + kSnapSlack) {
      fail(ErrorCode::invalid_input, where + ".location is more than half a grid step from the grid");
    }
    q.location = pts[i];
    q.index = i;
  }
}

double UncertaintySet::coefficient(int k, int v) const {
  const int nm = static_cast<int>(moments_.size());
  if (k < nm) return power(grid_[v], moments_[k].order);
  return v >= quantiles_[k - nm].index ? 1.0 : 0.0;
}

double UncertaintySet::target(int k) const {
  const int nm = static_cast<int>(moments_.size());
  return k < nm ? moments_[k].value : quantiles_[k - nm].prob;
}

UncertaintySet make_family(const FamilyTag& tag, int K) {
  const std::size_t expected = tag.kind == FamilyKind::mean_var ? 2 : 1;
  if (tag.kind == FamilyKind::general) fail(ErrorCode::invalid_input, "family: 'general' has no parametric form");
  if (tag.params.size() != expected) {
    fail(ErrorCode::invalid_input, std::string("family ") + to_string(tag.kind) + " expects " +
                                       std::to_string(expected) + " parameter(s)");
  }
  for (double p : tag.params) {
    if (!(p > 0.0 && p < 1.0)) fail(ErrorCode::invalid_input, "family parameter outside (0,1): " + tag.label());
  }
  const double x = tag.params[0];
  switch (tag.kind) {
    case FamilyKind::mean:
      return UncertaintySet(make_grid(0.0, 1.0, K), {{0, 1.0}, {1, x}}, {}, tag);
    case FamilyKind::mean_var: {
      const double s = tag.params[1];
      return UncertaintySet(make_grid(0.0, 1.0, K), {{0, 1.0}, {1, x}, {2, x * x + s * s}}, {}, tag);
    }
    case FamilyKind::median: {
      ValueGrid grid = make_grid(0.0, 1.0, K);
      return UncertaintySet(std::move(grid), {{0, 1.0}}, {{x, 0.5, 0}}, tag);
    }
    case FamilyKind::lower_bound:
      return UncertaintySet(make_grid(x, 1.0, K), {{0, 1.0}}, {}, tag);
    case FamilyKind::general:
      break;
  }
  fail(ErrorCode::invalid_input, "family: unsupported kind");
}

template <class Tag>
Weights<Tag>::Weights(ValueGrid grid, std::vector<double> weights)
    : grid_(std::move(grid)), weights_(std::move(weights)) {
  if (static_cast<int>(weights_.size()) != grid_.size()) {
    fail(ErrorCode::invalid_input, "weights: expected " + std::to_string(grid_.size()) + " entries, got " +
                                       std::to_string(weights_.size()));
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    if (!std::isfinite(weights_[i]) || weights_[i] < 0.0) {
      fail(ErrorCode::invalid_input, "weights[" + std::to_string(i) + "] is negative or non-finite");
    }
    sum += weights_[i];
  }
  if (std::abs(sum - 1.0) > kSumTol) {
    std::ostringstream msg;
    msg.precision(12);
    msg << "weights: sum is " << sum << ", expected 1 within 1e-9";
    fail(ErrorCode::invalid_input, msg.str());
  }
}

template <class Tag>
std::vector<double> Weights<Tag>::cdf() const {
  std::vector<double> out(weights_.size());
  std::partial_sum(weights_.begin(), weights_.end(), out.begin());
  return out;
}

template <class Tag>
Weights<Tag> Weights<Tag>::point_mass(ValueGrid grid, int index) {
  std::vector<double> w(grid.size(), 0.0);
  if (index < 0 || index >= grid.size()) fail(ErrorCode::invalid_input, "point mass index out of range");
  w[index] = 1.0;
  return Weights(std::move(grid), std::move(w));
}

template class Weights<DistributionTag>;
template class Weights<MechanismTag>;

std::vector<double> clean_simplex_weights(std::vector<double> raw) {
  double sum = 0.0;
  for (double& w : raw) {
    w = std::max(w, 0.0);
    sum += w;
  }
  if (!(sum > 0.0)) fail(ErrorCode::numerical_failure, "solver returned an empty mechanism");
  for (double& w : raw) w /= sum;
  return raw;
}

namespace {

lp::LpModel distribution_model(const UncertaintySet& set) {
  const int n = set.grid().size();
  lp::LpModel model;
  model.add_variables(n, 0.0, lp::kInf);
  for (int k = 0; k < set.num_constraints(); ++k) {
    std::vector<lp::Term> terms;
    for (int v = 0; v < n; ++v) {
      const double c = set.coefficient(k, v);
      if (c != 0.0) terms.push_back({v, c});
    }
    model.add_constraint(std::move(terms), lp::Relation::equal, set.target(k));
  }
  return model;
}

void require_same_grid(const ValueGrid& a, const ValueGrid& b) {
  if (!(a == b)) fail(ErrorCode::invalid_input, "mechanism and distribution live on different grids");
}

}  // namespace

bool check_feasible(const UncertaintySet& set, const lp::SolverOptions& options) {
  return lp::solve_feasibility(distribution_model(set), options).optimal();
}

void require_feasible(const UncertaintySet& set, const lp::SolverOptions& options) {
  if (!check_feasible(set, options)) {
    fail(ErrorCode::infeasible_set, "uncertainty set " + set.tag().label() + " contains no distribution");
  }
}

double opt_revenue(const Distribution& f) {
  const ValueGrid& g = f.grid();
  double best = 0.0;
  double tail = 0.0;
  for (int p = g.size() - 1; p >= 0; --p) {
    tail += f[p];
    best = std::max(best, g[p] * tail);
  }
  return best;
}

std::vector<double> revenue_curve(const Mechanism& phi) {
  const ValueGrid& g = phi.grid();
  std::vector<double> out(g.size());
  double acc = 0.0;
  for (int v = 0; v < g.size(); ++v) {
    acc += g[v] * phi[v];
    out[v] = acc;
  }
  return out;
}

double revenue(const Mechanism& phi, const Distribution& f) {
  require_same_grid(phi.grid(), f.grid());
  const std::vector<double> curve = revenue_curve(phi);
  double total = 0.0;
  for (int v = 0; v < f.size(); ++v) total += f[v] * curve[v];
  return total;
}

double regret(const Mechanism& phi, const Distribution& f) { return opt_revenue(f) - revenue(phi, f); }

double ratio(const Mechanism& phi, const Distribution& f) {
  const double opt = opt_revenue(f);
  const double rev = revenue(phi, f);
  return opt > 0.0 ? rev / opt : 1.0;
}

double lambda_regret(const Mechanism& phi, const Distribution& f, double lambda) {
  return lambda * opt_revenue(f) - revenue(phi, f);
}

WorstCase worst_case_certificate(const Mechanism& phi, const UncertaintySet& set, double lambda,
                                 const lp::SolverOptions& options) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) fail(ErrorCode::invalid_input, "lambda outside [0,1]");
  require_same_grid(phi.grid(), set.grid());
  const ValueGrid& g = set.grid();
  const int n = g.size();
  const std::vector<double> curve = revenue_curve(phi);

  lp::LpModel model = distribution_model(set);
  model.set_sense(lp::Sense::maximize);
  std::optional<WorstCase> best;
  for (int p = 0; p < n; ++p) {
    for (int v = 0; v < n; ++v) model.set_cost(v, (v >= p ? lambda * g[p] : 0.0) - curve[v]);
    const lp::LpSolution sol = lp::solve(model, options);
    if (sol.status == lp::Status::infeasible) {
      fail(ErrorCode::infeasible_set, "uncertainty set " + set.tag().label() + " contains no distribution");
    }
    if (!sol.optimal()) fail(ErrorCode::numerical_failure, "bounded p-program reported unbounded");
    if (!best || sol.objective > best->value) {
      best = WorstCase{sol.objective, Distribution(g, clean_simplex_weights(sol.values))};
    }
  }
  return *best;
}

}  // namespace robustprice
