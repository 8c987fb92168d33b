#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "robustprice/error.hpp"
#include "robustprice/instance.hpp"

using namespace robustprice;

namespace {

UncertaintySet two_point_support() { return make_family({FamilyKind::lower_bound, {0.5}}, 1); }

UncertaintySet two_point_singleton() {
  return UncertaintySet(make_grid(0.5, 1.0, 1), {{1, 0.75}}, {});
}

// Nature on {0.5, 1}: F = (1 - q, q). Sweep q and take the worst lambda-regret.
double two_point_sweep(const Mechanism& phi, double lambda) {
  const ValueGrid g = make_grid(0.5, 1.0, 1);
  double worst = -1e9;
  for (int k = 0; k <= 10000; ++k) {
    const double q = k * 1e-4;
    const Distribution f(g, {1.0 - q, q});
    worst = std::max(worst, lambda_regret(phi, f, lambda));
  }
  return worst;
}

// Double sum over (price, value) pairs with a sale whenever price <= value.
double brute_revenue(const Mechanism& phi, const Distribution& f) {
  const ValueGrid& g = phi.grid();
  double total = 0.0;
  for (int s = 0; s < g.size(); ++s) {
    for (int v = 0; v < g.size(); ++v) {
      if (g[s] <= g[v]) total += phi[s] * f[v] * g[s];
    }
  }
  return total;
}

std::vector<double> random_simplex(std::mt19937& rng, int n) {
  std::exponential_distribution<double> e(1.0);
  std::vector<double> w(n);
  double s = 0.0;
  for (double& x : w) s += (x = e(rng));
  for (double& x : w) x /= s;
  return w;
}

}  // namespace

TEST_CASE("grids include both endpoints") {
  const ValueGrid g = make_grid(0.0, 1.0, 100);
  CHECK(g.size() == 101);
  CHECK(g[0] == 0.0);
  CHECK(g[37] == doctest::Approx(0.37));
  CHECK(g[100] == 1.0);

  const ValueGrid two = make_grid(0.5, 1.0, 1);
  CHECK(two.points() == std::vector<double>{0.5, 1.0});

  const ValueGrid five = make_grid(0.2, 1.0, 4);
  REQUIRE(five.size() == 5);
  for (int i = 0; i < 5; ++i) CHECK(five[i] == doctest::Approx(0.2 * (i + 1)));

  CHECK(make_grid(0.0, 1.0, 7).points() == make_grid(0.0, 1.0, 7).points());
}

TEST_CASE("bad grids are rejected") {
  CHECK_THROWS_AS(make_grid(1.0, 1.0, 4), Error);
  CHECK_THROWS_AS(make_grid(-0.1, 1.0, 4), Error);
  CHECK_THROWS_AS(make_grid(0.0, 1.0, 0), Error);
  CHECK_THROWS_AS(ValueGrid::from_points({0.2, 0.2}), Error);
  CHECK_THROWS_AS(ValueGrid::from_points({}), Error);
}

TEST_CASE("families") {
  const UncertaintySet mv = make_family({FamilyKind::mean_var, {0.5, 0.2}}, 100);
  REQUIRE(mv.moments().size() == 3);
  CHECK(mv.moments()[0].value == 1.0);
  CHECK(mv.moments()[1].value == 0.5);
  CHECK(mv.moments()[2].value == doctest::Approx(0.29));
  CHECK(mv.grid().size() == 101);

  const UncertaintySet med = make_family({FamilyKind::median, {0.6}}, 100);
  REQUIRE(med.quantiles().size() == 1);
  CHECK(med.quantiles()[0].index == 60);
  CHECK(med.quantiles()[0].prob == 0.5);

  const UncertaintySet lb = two_point_support();
  CHECK(lb.grid().points() == std::vector<double>{0.5, 1.0});
  CHECK(lb.moments().size() == 1);

  CHECK_THROWS_AS(make_family({FamilyKind::mean, {1.0}}, 10), Error);
  CHECK_THROWS_AS(make_family({FamilyKind::mean_var, {0.5}}, 10), Error);
}

TEST_CASE("uncertainty set validation") {
  const ValueGrid g = make_grid(0.0, 1.0, 10);
  SUBCASE("mass constraint is added") {
    const UncertaintySet u(g, {{1, 0.4}}, {});
    REQUIRE(u.moments().size() == 2);
    CHECK(u.moments()[0].order == 0);
    CHECK(u.moments()[0].value == 1.0);
  }
  SUBCASE("quantiles snap to the grid") {
    const UncertaintySet u(g, {}, {{0.54, 0.3, 0}});
    CHECK(u.quantiles()[0].index == 5);
    CHECK(u.quantiles()[0].location == doctest::Approx(0.5));
    CHECK(u.coefficient(1, 4) == 0.0);
    CHECK(u.coefficient(1, 5) == 1.0);
  }
  SUBCASE("far quantiles are rejected") {
    CHECK_THROWS_AS(UncertaintySet(g, {}, {{1.2, 0.3, 0}}), Error);
    CHECK_THROWS_AS(UncertaintySet(g, {}, {{0.5, 1.3, 0}}), Error);
  }
  SUBCASE("moment table errors") {
    CHECK_THROWS_AS(UncertaintySet(g, {{0, 0.9}}, {}), Error);
    CHECK_THROWS_AS(UncertaintySet(g, {{1, 0.5}, {1, 0.4}}, {}), Error);
    CHECK_THROWS_AS(UncertaintySet(g, {{-1, 0.5}}, {}), Error);
  }
}

TEST_CASE("feasibility") {
  CHECK(check_feasible(make_family({FamilyKind::mean, {0.5}}, 100)));
  CHECK_FALSE(check_feasible(make_family({FamilyKind::mean_var, {0.1, 0.9}}, 100)));
  CHECK(check_feasible(make_family({FamilyKind::mean_var, {0.5, 0.5}}, 100)));
  CHECK_THROWS_AS(require_feasible(make_family({FamilyKind::mean_var, {0.1, 0.9}}, 10)), Error);
}

TEST_CASE("weights are validated, not renormalized") {
  const ValueGrid g = make_grid(0.5, 1.0, 1);
  CHECK_NOTHROW(Mechanism(g, {0.25, 0.75}));
  CHECK_THROWS_AS(Mechanism(g, {0.25, 0.76}), Error);
  CHECK_THROWS_AS(Mechanism(g, {-0.25, 1.25}), Error);
  CHECK_THROWS_AS(Mechanism(g, {1.0}), Error);
  CHECK(Mechanism(g, {0.25, 0.75}).cdf().back() == doctest::Approx(1.0));
}

TEST_CASE("optimal revenue with inclusive tails") {
  const ValueGrid g = make_grid(0.0, 1.0, 10);
  CHECK(opt_revenue(Distribution::point_mass(g, 7)) == doctest::Approx(0.7));

  const ValueGrid two = make_grid(0.5, 1.0, 1);
  CHECK(opt_revenue(Distribution(two, {0.5, 0.5})) == doctest::Approx(0.5));
  CHECK(opt_revenue(Distribution(two, {0.2, 0.8})) == doctest::Approx(0.8));
}

TEST_CASE("pointwise revenue, regret and ratio") {
  const ValueGrid g = make_grid(0.0, 1.0, 10);
  const Mechanism at7 = Mechanism::point_mass(g, 7);
  const Distribution v7 = Distribution::point_mass(g, 7);
  CHECK(revenue(at7, v7) == doctest::Approx(0.7));
  CHECK(regret(at7, v7) == doctest::Approx(0.0));
  CHECK(ratio(at7, v7) == doctest::Approx(1.0));

  const ValueGrid two = make_grid(0.5, 1.0, 1);
  const Mechanism low(two, {1.0, 0.0});
  const Distribution high(two, {0.0, 1.0});
  CHECK(revenue(low, high) == doctest::Approx(0.5));
  CHECK(regret(low, high) == doctest::Approx(0.5));
  CHECK(ratio(low, high) == doctest::Approx(0.5));

  const Mechanism half(two, {0.5, 0.5});
  const Distribution even(two, {0.5, 0.5});
  // Buyer at 0.5 pays 0.5 w.p. 0.5; buyer at 1 pays 0.75 on average.
  CHECK(revenue(half, even) == doctest::Approx(brute_revenue(half, even)));
  CHECK(revenue(half, even) == doctest::Approx(0.5));
  CHECK(regret(half, even) == doctest::Approx(0.0));
  CHECK(ratio(half, even) == doctest::Approx(1.0));

  // OPT = 0 only for a point mass at zero.
  CHECK(ratio(Mechanism::point_mass(g, 3), Distribution::point_mass(g, 0)) == 1.0);
  CHECK_THROWS_AS(revenue(low, v7), Error);
}

TEST_CASE("pointwise properties on random pairs") {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const double a = trial % 2 ? 0.0 : 0.1 * (1 + trial % 7);
    const ValueGrid g = make_grid(a, 1.0, 1 + trial % 12);
    const Mechanism phi(g, random_simplex(rng, g.size()));
    const Distribution f(g, random_simplex(rng, g.size()));
    const double opt = opt_revenue(f);
    CHECK(revenue(phi, f) == doctest::Approx(brute_revenue(phi, f)).epsilon(1e-12));
    CHECK(revenue(phi, f) <= opt + 1e-12);
    CHECK(opt >= g.lower() - 1e-12);
    CHECK(ratio(phi, f) <= 1.0 + 1e-12);
    CHECK(ratio(phi, f) >= 0.0);
    // OPT as a plain maximum does not depend on scan order.
    double forward = 0.0;
    for (int p = 0; p < g.size(); ++p) {
      double tail = 0.0;
      for (int v = p; v < g.size(); ++v) tail += f[v];
      forward = std::max(forward, g[p] * tail);
    }
    CHECK(forward == doctest::Approx(opt).epsilon(1e-12));
  }
}

TEST_CASE("worst case certificate on the two-point support set") {
  const UncertaintySet u = two_point_support();
  const ValueGrid& g = u.grid();

  const Mechanism half(g, {0.5, 0.5});
  const WorstCase w1 = worst_case_certificate(half, u, 1.0);
  CHECK(w1.value == doctest::Approx(0.25).epsilon(1e-9));
  CHECK(w1.value == doctest::Approx(two_point_sweep(half, 1.0)).epsilon(1e-9));
  CHECK(lambda_regret(half, w1.worst, 1.0) == doctest::Approx(w1.value));

  const Mechanism low(g, {1.0, 0.0});
  CHECK(worst_case_certificate(low, u, 0.0).value == doctest::Approx(-0.5));

  std::mt19937 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const Mechanism phi(g, random_simplex(rng, 2));
    const double lambda = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    CHECK(worst_case_certificate(phi, u, lambda).value ==
          doctest::Approx(two_point_sweep(phi, lambda)).epsilon(1e-6));
  }
}

TEST_CASE("singleton set has zero worst regret") {
  const UncertaintySet u = two_point_singleton();
  std::mt19937 rng(8);
  for (int trial = 0; trial < 5; ++trial) {
    const Mechanism phi(u.grid(), random_simplex(rng, 2));
    CHECK(std::abs(worst_case_certificate(phi, u, 1.0).value) <= 1e-9);
  }
}

TEST_CASE("certificate rejects infeasible sets") {
  const UncertaintySet u = make_family({FamilyKind::mean_var, {0.1, 0.9}}, 5);
  const Mechanism phi = Mechanism::point_mass(u.grid(), 0);
  try {
    worst_case_certificate(phi, u, 1.0);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::infeasible_set);
  }
}
