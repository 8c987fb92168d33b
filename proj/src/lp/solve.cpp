#include <chrono>
#include <cmath>

#include "robustprice/error.hpp"
#include "robustprice/lp.hpp"
#include "simplex.hpp"

namespace robustprice::lp {

namespace {

using detail::ColumnMatrix;
using detail::ComputationalForm;
using detail::CoreResult;

double sense_sign(const LpModel& model) { return model.sense() == Sense::minimize ? 1.0 : -1.0; }

ComputationalForm direct_form(const LpModel& model) {
  ComputationalForm form;
  const int n = model.num_vars();
  const int m = model.num_constraints();
  const double sign = sense_sign(model);

  std::vector<int> count(n, 0);
  for (const Constraint& row : model.constraints()) {
    for (const Term& t : row.terms) ++count[t.var];
  }
  ColumnMatrix& a = form.a;
  a.rows = m;
  a.cols = n;
  a.start.assign(n + 1, 0);
  for (int j = 0; j < n; ++j) a.start[j + 1] = a.start[j] + count[j];
  a.index.resize(a.start[n]);
  a.value.resize(a.start[n]);
  std::vector<int> fill(a.start.begin(), a.start.end() - 1);
  for (int i = 0; i < m; ++i) {
    for (const Term& t : model.constraints()[i].terms) {
      a.index[fill[t.var]] = i;
      a.value[fill[t.var]++] = t.coef;
    }
  }

  form.cost.resize(n);
  for (int j = 0; j < n; ++j) form.cost[j] = sign * model.costs()[j];
  form.col_lower = model.lower();
  form.col_upper = model.upper();
  form.row_lower.resize(m);
  form.row_upper.resize(m);
  for (int i = 0; i < m; ++i) {
    const Constraint& row = model.constraints()[i];
    form.row_lower[i] = row.relation == Relation::less_equal ? -kInf : row.rhs;
    form.row_upper[i] = row.relation == Relation::greater_equal ? kInf : row.rhs;
  }
  return form;
}

/// The model rewritten as  min c'.x' s.t. A' x' (rel) b',  x'_j >= 0 or free,
/// with x = shift + sign * x'. Finite upper bounds of doubly bounded
/// variables become extra <= rows appended after the model's rows.
struct Normalized {
  std::vector<double> shift;
  std::vector<double> sign;
  std::vector<bool> nonneg;
  std::vector<double> cost;
  std::vector<Constraint> rows;
};

Normalized normalize(const LpModel& model) {
  const int n = model.num_vars();
  Normalized out;
  out.shift.assign(n, 0.0);
  out.sign.assign(n, 1.0);
  out.nonneg.assign(n, false);
  out.cost.resize(n);
  std::vector<Constraint> bound_rows;
  for (int j = 0; j < n; ++j) {
    const double lo = model.lower()[j], up = model.upper()[j];
    if (std::isfinite(lo)) {
      out.shift[j] = lo;
      out.nonneg[j] = true;
      if (std::isfinite(up)) bound_rows.push_back({{{j, 1.0}}, Relation::less_equal, up - lo});
    } else if (std::isfinite(up)) {
      out.shift[j] = up;
      out.sign[j] = -1.0;
      out.nonneg[j] = true;
    }
    out.cost[j] = sense_sign(model) * model.costs()[j] * out.sign[j];
  }
  out.rows.reserve(model.num_constraints() + bound_rows.size());
  for (const Constraint& row : model.constraints()) {
    Constraint r{row.terms, row.relation, row.rhs};
    for (Term& t : r.terms) {
      r.rhs -= t.coef * out.shift[t.var];
      t.coef *= out.sign[t.var];
    }
    out.rows.push_back(std::move(r));
  }
  for (Constraint& r : bound_rows) out.rows.push_back(std::move(r));
  return out;
}

/// Dual of the normalized model in computational form:
///   min -b'.y  s.t.  (A'^T y)_j <= c'_j (x'_j >= 0) or = c'_j (free),
///   y_i >= 0 for >= rows, <= 0 for <= rows, free for = rows.
/// With `zero_cost` the right-hand sides c' are replaced by zero.
ComputationalForm dual_form(const Normalized& p, int n, bool zero_cost) {
  ComputationalForm form;
  const int m = static_cast<int>(p.rows.size());
  ColumnMatrix& a = form.a;
  a.rows = n;
  a.cols = m;
  a.start.assign(1, 0);
  form.cost.resize(m);
  form.col_lower.resize(m);
  form.col_upper.resize(m);
  for (int i = 0; i < m; ++i) {
    const Constraint& row = p.rows[i];
    for (const Term& t : row.terms) {
      if (t.coef == 0.0) continue;
      a.index.push_back(t.var);
      a.value.push_back(t.coef);
    }
    a.start.push_back(static_cast<int>(a.index.size()));
    form.cost[i] = -row.rhs;
    switch (row.relation) {
      case Relation::less_equal:
        form.col_lower[i] = -kInf;
        form.col_upper[i] = 0.0;
        break;
      case Relation::greater_equal:
        form.col_lower[i] = 0.0;
        form.col_upper[i] = kInf;
        break;
      case Relation::equal:
        form.col_lower[i] = -kInf;
        form.col_upper[i] = kInf;
        break;
    }
  }
  form.row_lower.resize(n);
  form.row_upper.resize(n);
  for (int j = 0; j < n; ++j) {
    const double c = zero_cost ? 0.0 : p.cost[j];
    form.row_upper[j] = c;
    form.row_lower[j] = p.nonneg[j] ? -kInf : c;
  }
  return form;
}

detail::StartBasis start_from(const WarmStart* warm, const ComputationalForm& form, bool dualized) {
  if (!warm || warm->rows != form.a.rows || warm->cols != form.a.cols || warm->dualized != dualized) return {};
  return {&warm->heads, &warm->state};
}

void save_basis(WarmStart* warm, const ComputationalForm& form, bool dualized, CoreResult& core) {
  if (!warm) return;
  warm->rows = form.a.rows;
  warm->cols = form.a.cols;
  warm->dualized = dualized;
  warm->heads = std::move(core.heads);
  warm->state = std::move(core.state);
}

LpSolution solve_direct(const LpModel& model, const SolverOptions& options, WarmStart* warm) {
  const ComputationalForm form = direct_form(model);
  CoreResult core = detail::run_simplex(form, options, start_from(warm, form, false));
  save_basis(warm, form, false, core);
  LpSolution sol;
  sol.status = core.status;
  sol.meta.iterations = core.iterations;
  if (core.status == Status::optimal) {
    sol.values = core.x;
    sol.objective = model.objective_value(sol.values);
    sol.duals = core.row_duals;
    const double sign = sense_sign(model);
    for (double& d : sol.duals) d *= sign;
  }
  return sol;
}

LpSolution solve_dualized(const LpModel& model, const SolverOptions& options, WarmStart* warm) {
  const int n = model.num_vars();
  const int m = model.num_constraints();
  const Normalized p = normalize(model);

  LpSolution sol;
  sol.meta.dualized = true;
  const ComputationalForm form = dual_form(p, n, false);
  CoreResult core = detail::run_simplex(form, options, start_from(warm, form, true));
  sol.meta.iterations = core.iterations;
  save_basis(warm, form, true, core);

  if (core.status == Status::unbounded) {
    sol.status = Status::infeasible;
    return sol;
  }
  if (core.status == Status::infeasible) {
    // Dual infeasible: the primal is unbounded or infeasible. The dual of the
    // zero-objective primal is feasible at y = 0 and bounded iff the primal
    // is feasible.
    const CoreResult probe = detail::run_simplex(dual_form(p, n, true), options);
    sol.meta.iterations += probe.iterations;
    sol.status = probe.status == Status::optimal ? Status::unbounded : Status::infeasible;
    return sol;
  }

  sol.status = Status::optimal;
  sol.values.resize(n);
  for (int j = 0; j < n; ++j) {
    sol.values[j] = p.shift[j] + p.sign[j] * (-core.row_duals[j]);
  }
  sol.objective = model.objective_value(sol.values);
  sol.duals.assign(core.x.begin(), core.x.begin() + m);
  const double sign = sense_sign(model);
  for (double& d : sol.duals) d *= sign;
  return sol;
}

}  // namespace

LpSolution solve(const LpModel& model, const SolverOptions& options, WarmStart* warm) {
  const auto start = std::chrono::steady_clock::now();
  const bool dualize = options.allow_dualize && model.num_constraints() > 0 &&
                       model.num_constraints() > options.dualize_ratio * model.num_vars();
  const auto attempt = [&](WarmStart* w) {
    LpSolution out = dualize ? solve_dualized(model, options, w) : solve_direct(model, options, w);
    if (out.optimal()) {
      const double violation = model.max_violation(out.values);
      if (violation > options.feasibility_tol) {
        fail(ErrorCode::numerical_failure, "LP solution violates constraints by " + std::to_string(violation));
      }
    }
    return out;
  };
  LpSolution sol;
  if (warm && warm->rows >= 0) {
    // A stale basis can steer the simplex into trouble a cold start avoids.
    try {
      sol = attempt(warm);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::numerical_failure) throw;
      *warm = WarmStart{};
      sol = attempt(warm);
    }
  } else {
    sol = attempt(warm);
  }
  sol.meta.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return sol;
}

LpSolution solve_feasibility(const LpModel& model, const SolverOptions& options) {
  LpModel copy = model;
  copy.set_sense(Sense::minimize);
  for (int j = 0; j < copy.num_vars(); ++j) copy.set_cost(j, 0.0);
  return solve(copy, options);
}

}  // namespace robustprice::lp
