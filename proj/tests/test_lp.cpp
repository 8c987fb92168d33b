#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "doctest.h"
#include "robustprice/error.hpp"
#include "robustprice/lp.hpp"

using namespace robustprice;
using namespace robustprice::lp;

namespace {

// Brute-force LP oracle: every vertex of {rows, box bounds} is the solution
// of n active constraints; enumerate them all and keep the best feasible one.
// Only usable for tiny boxed models.
struct OracleResult {
  bool feasible = false;
  double objective = 0.0;
};

OracleResult vertex_oracle(const LpModel& model) {
  const int n = model.num_vars();
  struct Plane {
    Eigen::VectorXd a;
    double b;
  };
  std::vector<Plane> planes;
  for (const Constraint& row : model.constraints()) {
    Eigen::VectorXd a = Eigen::VectorXd::Zero(n);
    for (const Term& t : row.terms) a[t.var] += t.coef;
    planes.push_back({a, row.rhs});
  }
  for (int j = 0; j < n; ++j) {
    Eigen::VectorXd e = Eigen::VectorXd::Unit(n, j);
    planes.push_back({e, model.lower()[j]});
    planes.push_back({e, model.upper()[j]});
  }
  const int total = static_cast<int>(planes.size());
  OracleResult best;
  const double sign = model.sense() == Sense::minimize ? 1.0 : -1.0;
  std::vector<int> pick(n);
  // Iterate over all n-subsets of planes.
  std::vector<bool> mask(total, false);
  std::fill(mask.begin(), mask.begin() + n, true);
  do {
    Eigen::MatrixXd a(n, n);
    Eigen::VectorXd b(n);
    int r = 0;
    for (int k = 0; k < total; ++k) {
      if (!mask[k]) continue;
      a.row(r) = planes[k].a.transpose();
      b[r] = planes[k].b;
      ++r;
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
    if (lu.rank() < n) continue;
    const Eigen::VectorXd x = lu.solve(b);
    std::vector<double> xv(x.data(), x.data() + n);
    if (model.max_violation(xv) > 1e-9) continue;
    const double obj = model.objective_value(xv);
    if (!best.feasible || sign * obj < sign * best.objective) {
      best.feasible = true;
      best.objective = obj;
    }
  } while (std::prev_permutation(mask.begin(), mask.end()));
  return best;
}

LpModel random_boxed_model(std::mt19937& rng, int n, int m) {
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  std::uniform_int_distribution<int> rel(0, 2);
  LpModel model;
  for (int j = 0; j < n; ++j) model.add_variable(-2.0 + coef(rng), 2.0 + coef(rng), coef(rng));
  for (int i = 0; i < m; ++i) {
    std::vector<Term> terms;
    for (int j = 0; j < n; ++j) terms.push_back({j, coef(rng)});
    const int r = rel(rng);
    // Equalities are rare so that most random models stay feasible.
    const Relation relation = r == 0 ? Relation::less_equal : (r == 1 ? Relation::greater_equal : (i == 0 ? Relation::equal : Relation::less_equal));
    model.add_constraint(std::move(terms), relation, coef(rng));
  }
  model.set_sense(rel(rng) == 0 ? Sense::maximize : Sense::minimize);
  return model;
}

}  // namespace

TEST_CASE("minimize x subject to x >= 3") {
  LpModel model;
  const int x = model.add_variable(-kInf, kInf, 1.0);
  model.add_constraint({{x, 1.0}}, Relation::greater_equal, 3.0);
  const LpSolution sol = solve(model);
  REQUIRE(sol.status == Status::optimal);
  CHECK(sol.objective == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(sol.values[0] == doctest::Approx(3.0));
  CHECK(sol.duals[0] == doctest::Approx(1.0));
}

TEST_CASE("maximize x + y over the simplex corner") {
  LpModel model;
  model.set_sense(Sense::maximize);
  const int x = model.add_variable(0.0, kInf, 1.0);
  const int y = model.add_variable(0.0, kInf, 1.0);
  model.add_constraint({{x, 1.0}, {y, 1.0}}, Relation::less_equal, 1.0);
  const LpSolution sol = solve(model);
  REQUIRE(sol.optimal());
  CHECK(sol.objective == doctest::Approx(1.0));
  CHECK(sol.duals[0] == doctest::Approx(1.0));
}

TEST_CASE("contradictory bound rows are infeasible") {
  LpModel model;
  const int x = model.add_variable(0.0, kInf, 0.0);
  model.add_constraint({{x, 1.0}}, Relation::less_equal, -1.0);
  CHECK(solve(model).status == Status::infeasible);
}

TEST_CASE("unbounded ray is reported") {
  LpModel model;
  const int x = model.add_variable(0.0, kInf, -1.0);
  const int y = model.add_variable(0.0, kInf, 0.0);
  model.add_constraint({{x, 1.0}, {y, -1.0}}, Relation::less_equal, 1.0);
  CHECK(solve(model).status == Status::unbounded);
}

TEST_CASE("feasibility checks") {
  SUBCASE("0 <= x <= 1 is feasible") {
    LpModel model;
    const int x = model.add_variable();
    model.add_constraint({{x, 1.0}}, Relation::greater_equal, 0.0);
    model.add_constraint({{x, 1.0}}, Relation::less_equal, 1.0);
    CHECK(solve_feasibility(model).optimal());
  }
  SUBCASE("x >= 2 and x <= 1 is infeasible") {
    LpModel model;
    const int x = model.add_variable();
    model.add_constraint({{x, 1.0}}, Relation::greater_equal, 2.0);
    model.add_constraint({{x, 1.0}}, Relation::less_equal, 1.0);
    CHECK(solve_feasibility(model).status == Status::infeasible);
  }
  SUBCASE("no constraints is feasible") {
    LpModel model;
    model.add_variable(0.0, kInf, 5.0);
    CHECK(solve_feasibility(model).optimal());
  }
}

TEST_CASE("tall models are dualized and recover primal and duals") {
  // min t  s.t.  t >= a_k . x for many k, x on the simplex.
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  LpModel model;
  const int t = model.add_variable(-kInf, kInf, 1.0);
  const int x0 = model.add_variables(3, 0.0, kInf);
  model.add_constraint({{x0, 1.0}, {x0 + 1, 1.0}, {x0 + 2, 1.0}}, Relation::equal, 1.0);
  for (int k = 0; k < 40; ++k) {
    model.add_constraint({{t, 1.0}, {x0, -u(rng)}, {x0 + 1, -u(rng)}, {x0 + 2, -u(rng)}},
                         Relation::greater_equal, 0.0);
  }
  const LpSolution dual_path = solve(model);
  SolverOptions direct;
  direct.allow_dualize = false;
  const LpSolution direct_path = solve(model, direct);
  REQUIRE(dual_path.optimal());
  REQUIRE(direct_path.optimal());
  CHECK(dual_path.meta.dualized);
  CHECK_FALSE(direct_path.meta.dualized);
  CHECK(dual_path.objective == doctest::Approx(direct_path.objective).epsilon(1e-9));
  CHECK(model.max_violation(dual_path.values) <= 1e-7);
  // Strong duality through the reported multipliers.
  double dual_obj = 0.0;
  for (int i = 0; i < model.num_constraints(); ++i) dual_obj += dual_path.duals[i] * model.constraints()[i].rhs;
  CHECK(dual_obj == doctest::Approx(dual_path.objective).epsilon(1e-9));
}

TEST_CASE("random boxed models agree with vertex enumeration") {
  std::mt19937 rng(2024);
  int feasible_count = 0;
  for (int trial = 0; trial < 150; ++trial) {
    const int n = 2 + trial % 3;
    const int m = 1 + trial % 5 + (trial % 2) * 6;
    const LpModel model = random_boxed_model(rng, n, m);
    const OracleResult oracle = vertex_oracle(model);
    for (bool dualize : {false, true}) {
      SolverOptions options;
      options.allow_dualize = dualize;
      options.dualize_ratio = 0.0;
      const LpSolution sol = solve(model, options);
      CAPTURE(trial);
      CAPTURE(dualize);
      if (oracle.feasible) {
        REQUIRE(sol.status == Status::optimal);
        CHECK(sol.objective == doctest::Approx(oracle.objective).epsilon(1e-7));
        CHECK(model.max_violation(sol.values) <= 1e-7);
      } else {
        CHECK(sol.status == Status::infeasible);
      }
    }
    feasible_count += oracle.feasible;
  }
  CHECK(feasible_count > 50);
}

TEST_CASE("re-solving is deterministic") {
  std::mt19937 rng(99);
  const LpModel model = random_boxed_model(rng, 4, 9);
  const LpSolution a = solve(model);
  const LpSolution b = solve(model);
  REQUIRE(a.status == b.status);
  CHECK(a.objective == b.objective);
  CHECK(a.values == b.values);
}

TEST_CASE("perturbing a slack row leaves the optimum unchanged") {
  std::mt19937 rng(5);
  int checked = 0;
  for (int trial = 0; trial < 40 && checked < 10; ++trial) {
    const LpModel model = random_boxed_model(rng, 3, 6);
    const LpSolution sol = solve(model);
    if (!sol.optimal()) continue;
    for (int i = 0; i < model.num_constraints(); ++i) {
      const Constraint& row = model.constraints()[i];
      if (row.relation == Relation::equal) continue;
      double activity = 0.0;
      for (const Term& t : row.terms) activity += t.coef * sol.values[t.var];
      if (std::abs(activity - row.rhs) < 1e-2) continue;
      for (double delta : {-1e-3, 1e-3}) {
        LpModel shifted;
        shifted.set_sense(model.sense());
        for (int j = 0; j < model.num_vars(); ++j) {
          shifted.add_variable(model.lower()[j], model.upper()[j], model.costs()[j]);
        }
        for (int k = 0; k < model.num_constraints(); ++k) {
          const Constraint& c = model.constraints()[k];
          shifted.add_constraint(c.terms, c.relation, c.rhs + (k == i ? delta : 0.0));
        }
        const LpSolution moved = solve(shifted);
        REQUIRE(moved.optimal());
        CHECK(std::abs(moved.objective - sol.objective) <= 1e-6);
      }
      ++checked;
      break;
    }
  }
  CHECK(checked > 0);
}

TEST_CASE("model validation rejects bad input") {
  LpModel model;
  model.add_variable();
  CHECK_THROWS_AS(model.add_constraint({{3, 1.0}}, Relation::equal, 0.0), Error);
  CHECK_THROWS_AS(model.add_constraint({{0, NAN}}, Relation::equal, 0.0), Error);
  CHECK_THROWS_AS(model.add_variable(1.0, 0.0), Error);
}

TEST_CASE("LP text dump names variables v0..vN") {
  LpModel model;
  const int x = model.add_variable(0.0, kInf, 1.0);
  const int y = model.add_variable();
  model.add_constraint({{x, 1.0}, {y, -2.0}}, Relation::less_equal, 4.0);
  const std::string text = model.to_lp_format();
  CHECK(text.find("Minimize") != std::string::npos);
  CHECK(text.find("c0: + 1 v0 - 2 v1 <= 4") != std::string::npos);
  CHECK(text.find("v1 free") != std::string::npos);
  CHECK(text.find("v0 >= 0") != std::string::npos);
}

TEST_CASE("many constraints through one vertex") {
  // Every row passes through x = 0, so the dualized model starts at a fully
  // degenerate vertex. Infeasible when every row weight is positive.
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(0.1, 1.0);
  for (const bool feasible : {false, true}) {
    CAPTURE(feasible);
    constexpr int n = 30;
    LpModel model;
    model.add_variables(n, 0.0, kInf);
    for (int i = 0; i < 20 * n; ++i) {
      std::vector<Term> row;
      for (int j = 0; j < n; ++j) {
        // Column 0 stays out of every row in the feasible variant.
        if (feasible && j == 0) continue;
        row.push_back({j, u(rng)});
      }
      model.add_constraint(std::move(row), Relation::less_equal, 0.0);
    }
    std::vector<Term> mass;
    for (int j = 0; j < n; ++j) mass.push_back({j, 1.0});
    model.add_constraint(std::move(mass), Relation::equal, 1.0);
    const LpSolution sol = solve_feasibility(model);
    CHECK(sol.optimal() == feasible);
    if (feasible) CHECK(sol.values[0] == doctest::Approx(1.0));
  }
}
