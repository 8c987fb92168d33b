#pragma once

// Solver-independent reference computations for small instances.

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "robustprice/instance.hpp"

namespace oracle {

using namespace robustprice;

inline std::vector<double> random_simplex(std::mt19937& rng, int n) {
  std::exponential_distribution<double> e(1.0);
  std::vector<double> w(n);
  double s = 0.0;
  for (double& x : w) s += (x = e(rng));
  for (double& x : w) x /= s;
  return w;
}

/// A feasible set on a grid with K <= max_k: moments and at most one tail
/// constraint read off a hidden random distribution.
inline UncertaintySet random_set(std::mt19937& rng, int max_k = 10) {
  std::uniform_int_distribution<int> kdist(1, max_k);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int K = kdist(rng);
  const double a = u(rng) < 0.4 ? 0.0 : 0.5 * u(rng);
  const double b = a + 0.5 + u(rng);
  const ValueGrid grid = make_grid(a, b, K);
  std::vector<double> hidden = random_simplex(rng, grid.size());
  // Sparse hidden distributions push the set towards the boundary.
  if (u(rng) < 0.5) {
    for (double& h : hidden) h = u(rng) < 0.5 ? 0.0 : h;
    if (std::all_of(hidden.begin(), hidden.end(), [](double h) { return h == 0.0; })) hidden[0] = 1.0;
    double s = 0.0;
    for (double h : hidden) s += h;
    for (double& h : hidden) h /= s;
  }
  std::vector<MomentConstraint> moments;
  const int shape = std::uniform_int_distribution<int>(0, 3)(rng);
  for (int order = 1; order <= 2; ++order) {
    if (!(shape & order)) continue;
    double m = 0.0;
    for (int v = 0; v < grid.size(); ++v) m += hidden[v] * std::pow(grid[v], order);
    moments.push_back({order, m});
  }
  std::vector<QuantileConstraint> quantiles;
  if (u(rng) < 0.4) {
    const int idx = std::uniform_int_distribution<int>(0, grid.size() - 1)(rng);
    double tail = 0.0;
    for (int v = idx; v < grid.size(); ++v) tail += hidden[v];
    quantiles.push_back({grid[idx], std::min(1.0, tail), 0});
  }
  return UncertaintySet(grid, moments, quantiles, {FamilyKind::general, {}});
}

/// Vertices of Nature's polytope {F >= 0, constraint rows}: basic feasible
/// solutions over every column subset of size up to the row count.
inline std::vector<Distribution> vertices(const UncertaintySet& set) {
  const int n = set.grid().size();
  const int m = set.num_constraints();
  std::vector<Distribution> out;
  std::vector<int> subset;
  auto visit = [&](auto&& self, int start) -> void {
    if (!subset.empty()) {
      const int s = static_cast<int>(subset.size());
      Eigen::MatrixXd a(m, s);
      Eigen::VectorXd t(m);
      for (int k = 0; k < m; ++k) {
        t[k] = set.target(k);
        for (int c = 0; c < s; ++c) a(k, c) = set.coefficient(k, subset[c]);
      }
      Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
      if (lu.rank() == s) {
        const Eigen::VectorXd x = lu.solve(t);
        if ((a * x - t).cwiseAbs().maxCoeff() < 1e-10 && x.minCoeff() > -1e-12) {
          std::vector<double> w(n, 0.0);
          double sum = 0.0;
          for (int c = 0; c < s; ++c) sum += (w[subset[c]] = std::max(0.0, x[c]));
          for (double& wv : w) wv /= sum;
          out.emplace_back(set.grid(), w);
        }
      }
    }
    if (static_cast<int>(subset.size()) == m) return;
    for (int j = start; j < n; ++j) {
      subset.push_back(j);
      self(self, j + 1);
      subset.pop_back();
    }
  };
  visit(visit, 0);
  return out;
}

/// lambda OPT(F) - revenue is convex in F, so its maximum over the polytope
/// sits at a vertex.
inline double worst_lambda_regret(const Mechanism& phi, const std::vector<Distribution>& verts, double lambda) {
  double worst = -1e300;
  for (const Distribution& f : verts) worst = std::max(worst, lambda_regret(phi, f, lambda));
  return worst;
}

/// Min of revenue / OPT over the polytope. For any level t, some vertex has
/// t OPT - revenue >= 0 whenever some point does, so vertices suffice.
inline double worst_ratio(const Mechanism& phi, const std::vector<Distribution>& verts) {
  double worst = 1.0;
  for (const Distribution& f : verts) worst = std::min(worst, ratio(phi, f));
  return worst;
}

/// All-criteria relative performance with one distribution scoring all three
/// criteria at once: the minimum over vertices of the three ratios.
inline double joint_relperf_all(const Mechanism& phi, const std::vector<Distribution>& verts, double theta_revenue,
                                double theta_regret, double theta_ratio) {
  double worst = 1.0;
  for (const Distribution& f : verts) {
    const double rev = theta_revenue <= 1e-7 ? 1.0 : revenue(phi, f) / theta_revenue;
    const double reg = regret(phi, f);
    const double reg_rel = theta_regret <= 1e-7 ? (reg <= 1e-7 ? 1.0 : 0.0) : std::min(1.0, theta_regret / reg);
    const double rat = theta_ratio <= 1e-7 ? 1.0 : ratio(phi, f) / theta_ratio;
    worst = std::min({worst, rev, reg_rel, rat});
  }
  return worst;
}

}  // namespace oracle
