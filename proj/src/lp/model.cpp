#include <algorithm>
#include <cmath>
#include <sstream>

#include "robustprice/error.hpp"
#include "robustprice/lp.hpp"

namespace robustprice {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_input: return "invalid-input";
    case ErrorCode::infeasible_set: return "infeasible-set";
    case ErrorCode::numerical_failure: return "numerical-failure";
    case ErrorCode::old_constraint_infeasible: return "old-constraint-infeasible";
    case ErrorCode::inconsistent_inputs: return "inconsistent-inputs";
  }
  return "unknown";
}

namespace lp {

const char* to_string(Status status) {
  switch (status) {
    case Status::optimal: return "optimal";
    case Status::infeasible: return "infeasible";
    case Status::unbounded: return "unbounded";
  }
  return "unknown";
}

int LpModel::add_variable(double lower, double upper, double cost) {
  if (std::isnan(lower) || std::isnan(upper) || lower > upper || !std::isfinite(cost)) {
    fail(ErrorCode::invalid_input, "invalid variable bounds or cost");
  }
  lower_.push_back(lower);
  upper_.push_back(upper);
  cost_.push_back(cost);
  return num_vars() - 1;
}

int LpModel::add_variables(int count, double lower, double upper) {
  const int first = num_vars();
  for (int k = 0; k < count; ++k) add_variable(lower, upper);
  return first;
}

void LpModel::check_var(int var) const {
  if (var < 0 || var >= num_vars()) {
    fail(ErrorCode::invalid_input, "variable index " + std::to_string(var) + " out of range");
  }
}

int LpModel::add_constraint(std::vector<Term> terms, Relation relation, double rhs) {
  for (const Term& t : terms) {
    check_var(t.var);
    if (!std::isfinite(t.coef)) fail(ErrorCode::invalid_input, "non-finite constraint coefficient");
  }
  if (!std::isfinite(rhs)) fail(ErrorCode::invalid_input, "non-finite right-hand side");
  rows_.push_back(Constraint{std::move(terms), relation, rhs});
  return num_constraints() - 1;
}

void LpModel::set_cost(int var, double cost) {
  check_var(var);
  if (!std::isfinite(cost)) fail(ErrorCode::invalid_input, "non-finite objective coefficient");
  cost_[var] = cost;
}

void LpModel::set_bounds(int var, double lower, double upper) {
  check_var(var);
  if (std::isnan(lower) || std::isnan(upper) || lower > upper) {
    fail(ErrorCode::invalid_input, "invalid variable bounds");
  }
  lower_[var] = lower;
  upper_[var] = upper;
}

std::size_t LpModel::num_nonzeros() const {
  std::size_t total = 0;
  for (const Constraint& row : rows_) total += row.terms.size();
  return total;
}

double LpModel::objective_value(const std::vector<double>& x) const {
  double obj = 0.0;
  for (int j = 0; j < num_vars(); ++j) obj += cost_[j] * x[j];
  return obj;
}

double LpModel::max_violation(const std::vector<double>& x) const {
  double worst = 0.0;
  for (int j = 0; j < num_vars(); ++j) {
    worst = std::max({worst, lower_[j] - x[j], x[j] - upper_[j]});
  }
  for (const Constraint& row : rows_) {
    double activity = 0.0;
    for (const Term& t : row.terms) activity += t.coef * x[t.var];
    const double gap = activity - row.rhs;
    switch (row.relation) {
      case Relation::less_equal: worst = std::max(worst, gap); break;
      case Relation::greater_equal: worst = std::max(worst, -gap); break;
      case Relation::equal: worst = std::max(worst, std::abs(gap)); break;
    }
  }
  return worst;
}

namespace {

void write_linear(std::ostringstream& out, const std::vector<Term>& terms) {
  if (terms.empty()) {
    out << " 0 v0";
    return;
  }
  for (const Term& t : terms) {
    out << (t.coef < 0 ? " - " : " + ") << std::abs(t.coef) << " v" << t.var;
  }
}

}  // namespace

std::string LpModel::to_lp_format() const {
  std::ostringstream out;
  out.precision(17);
  out << (sense_ == Sense::minimize ? "Minimize" : "Maximize") << "\n obj:";
  std::vector<Term> objective;
  for (int j = 0; j < num_vars(); ++j) {
    if (cost_[j] != 0.0) objective.push_back({j, cost_[j]});
  }
  write_linear(out, objective);
  out << "\nSubject To\n";
  for (int i = 0; i < num_constraints(); ++i) {
    const Constraint& row = rows_[i];
    out << " c" << i << ":";
    write_linear(out, row.terms);
    switch (row.relation) {
      case Relation::less_equal: out << " <= "; break;
      case Relation::greater_equal: out << " >= "; break;
      case Relation::equal: out << " = "; break;
    }
    out << row.rhs << "\n";
  }
  out << "Bounds\n";
  for (int j = 0; j < num_vars(); ++j) {
    const bool lo = std::isfinite(lower_[j]), up = std::isfinite(upper_[j]);
    if (!lo && !up) {
      out << " v" << j << " free\n";
    } else if (lo && up) {
      out << " " << lower_[j] << " <= v" << j << " <= " << upper_[j] << "\n";
    } else if (lo) {
      out << " v" << j << " >= " << lower_[j] << "\n";
    } else {
      out << " -inf <= v" << j << " <= " << upper_[j] << "\n";
    }
  }
  out << "End\n";
  return out.str();
}

}  // namespace lp
}  // namespace robustprice
