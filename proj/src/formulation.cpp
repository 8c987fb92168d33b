#include "formulation.hpp"

#include "robustprice/error.hpp"

namespace robustprice::detail {

RevenueSource add_mechanism(lp::LpModel& model, const ValueGrid& grid) {
  const int n = grid.size();
  const int phi = model.add_variables(n, 0.0, lp::kInf);
  const int rev = model.add_variables(n, -lp::kInf, lp::kInf);
  std::vector<lp::Term> mass;
  for (int s = 0; s < n; ++s) mass.push_back({phi + s, 1.0});
  model.add_constraint(std::move(mass), lp::Relation::equal, 1.0);
  for (int v = 0; v < n; ++v) {
    std::vector<lp::Term> terms{{rev + v, 1.0}, {phi + v, -grid[v]}};
    if (v > 0) terms.push_back({rev + v - 1, -1.0});
    model.add_constraint(std::move(terms), lp::Relation::equal, 0.0);
  }
  return RevenueSource({}, phi, rev);
}

Mechanism read_mechanism(const RevenueSource& source, const ValueGrid& grid, const lp::LpSolution& sol) {
  std::vector<double> w(grid.size());
  for (int s = 0; s < grid.size(); ++s) w[s] = sol.values[source.phi_col(s)];
  return Mechanism(grid, clean_simplex_weights(std::move(w)));
}

LambdaBlock add_lambda_block(lp::LpModel& model, const UncertaintySet& set, double lambda,
                             const RevenueSource& revenue, int theta_col, double bound, int p_begin,
                             int p_end) {
  const ValueGrid& g = set.grid();
  const int n = g.size();
  const int nk = set.num_constraints();
  LambdaBlock block;
  block.p_begin = p_begin;
  block.p_end = p_end;
  block.per_price = nk;
  block.first_col = model.add_variables((p_end - p_begin) * nk, -lp::kInf, lp::kInf);

  for (int p = p_begin; p < p_end; ++p) {
    std::vector<lp::Term> top;
    for (int k = 0; k < nk; ++k) {
      const double t = set.target(k);
      if (t != 0.0) top.push_back({block.col(p, k), t});
    }
    if (theta_col >= 0) {
      top.push_back({theta_col, -1.0});
      model.add_constraint(std::move(top), lp::Relation::less_equal, 0.0);
    } else {
      model.add_constraint(std::move(top), lp::Relation::less_equal, bound);
    }
    for (int v = 0; v < n; ++v) {
      // -R_v - sum_k y_k c_k(v) <= -lambda p 1(v >= p)
      std::vector<lp::Term> row;
      double rhs = v >= p ? -lambda * g[p] : 0.0;
      if (revenue.is_fixed()) {
        rhs += revenue.constant(v);
      } else {
        row.push_back({revenue.rev_col(v), -1.0});
      }
      for (int k = 0; k < nk; ++k) {
        const double c = set.coefficient(k, v);
        if (c != 0.0) row.push_back({block.col(p, k), -c});
      }
      model.add_constraint(std::move(row), lp::Relation::less_equal, rhs);
    }
  }
  return block;
}

void add_ratio_block(lp::LpModel& model, const UncertaintySet& set, const RevenueSource& revenue, int r_col) {
  const ValueGrid& g = set.grid();
  const int n = g.size();
  const int nk = set.num_constraints();
  // The mass row has t_0 - c_0(v) = 0 everywhere; its multiplier drops out.
  std::vector<int> kept;
  for (int k = 0; k < nk; ++k) {
    bool used = false;
    for (int v = 0; v < n && !used; ++v) used = set.target(k) != set.coefficient(k, v);
    if (used) kept.push_back(k);
  }
  const int first = model.add_variables(n * static_cast<int>(kept.size()), -lp::kInf, lp::kInf);
  for (int p = 0; p < n; ++p) {
    for (int v = 0; v < n; ++v) {
      std::vector<lp::Term> row;
      double rhs = 0.0;
      if (revenue.is_fixed()) {
        rhs = -revenue.constant(v);
      } else {
        row.push_back({revenue.rev_col(v), 1.0});
      }
      for (std::size_t idx = 0; idx < kept.size(); ++idx) {
        const int k = kept[idx];
        const double c = set.target(k) - set.coefficient(k, v);
        if (c != 0.0) row.push_back({first + p * static_cast<int>(kept.size()) + static_cast<int>(idx), c});
      }
      if (v >= p && g[p] != 0.0) row.push_back({r_col, -g[p]});
      model.add_constraint(std::move(row), lp::Relation::greater_equal, rhs);
    }
  }
}

void read_certificate(const LambdaBlock& block, const UncertaintySet& set, const lp::LpSolution& sol,
                      DualCertificate& cert) {
  const int nm = static_cast<int>(set.moments().size());
  const int nq = static_cast<int>(set.quantiles().size());
  for (int p = block.p_begin; p < block.p_end; ++p) {
    std::vector<double> alpha(nm), beta(nq);
    for (int i = 0; i < nm; ++i) alpha[i] = sol.values[block.col(p, i)];
    for (int j = 0; j < nq; ++j) beta[j] = sol.values[block.col(p, nm + j)];
    cert.alpha.push_back(std::move(alpha));
    cert.beta.push_back(std::move(beta));
  }
}

lp::LpSolution solve_checked(const lp::LpModel& model, const UncertaintySet& set, const lp::SolverOptions& options,
                             const char* what, lp::WarmStart* warm) {
  lp::LpSolution sol = lp::solve(model, options, warm);
  if (sol.status == lp::Status::unbounded) {
    // The dual blocks are unbounded below exactly when Nature has no move.
    require_feasible(set, options);
    fail(ErrorCode::numerical_failure, std::string(what) + ": LP reported unbounded on a feasible set");
  }
  return sol;
}

}  // namespace robustprice::detail
