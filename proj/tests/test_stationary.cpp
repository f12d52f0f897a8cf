#include <cmath>
#include <stdexcept>

#include "doctest.h"

#include "bqp/grid.hpp"
#include "bqp/stationary.hpp"
#include "test_util.hpp"

using namespace bqp;

namespace {
const Params P(0.25, 0.75);
}

TEST_CASE("largest admissible current is the smaller endpoint mobility") {
  CHECK(current_bound(P) == doctest::Approx(0.1875).epsilon(1e-15));
  CHECK(current_bound(Params(0.3, 0.6)) == doctest::Approx(0.21).epsilon(1e-15));
  CHECK(current_bound(Params(0.55, 0.9)) == doctest::Approx(0.09).epsilon(1e-15));
}

TEST_CASE("current vanishes at the balanced viscosity and flips sign there") {
  CHECK(std::fabs(solve_current(P, P.eps0)) <= 1e-9);

  // pinned values along the viscosity sweep; J decreases strictly with eps
  const double f[4] = {0.1, 0.3, 0.8, 1.5};
  const double expect[4] = {0.1865071, 0.1549163, 0.04508462, -0.1132261};
  double prev = current_bound(P);
  for (int k = 0; k < 4; ++k) {
    const double J = solve_current(P, f[k] * P.eps0);
    CHECK(J == doctest::Approx(expect[k]).epsilon(1e-5));
    CHECK(((f[k] < 1.0) == (J > 0.0)));
    CHECK(J < prev);
    prev = J;
  }
}

TEST_CASE("current approaches the inviscid bound from below as eps vanishes") {
  const double J = solve_current(P, 0.05);
  CHECK(J == doctest::Approx(0.18589918).epsilon(1e-6));
  const double gap = 0.1875 - J;
  CHECK(gap > 5e-4);
  CHECK(gap < 2e-3);
}

TEST_CASE("stationary profile solves the first-order equation") {
  Grid g(401);
  const double eps = 0.3 * P.eps0;
  StationaryResult st = stationary_profile(P, eps, g);
  CHECK(st.rho_bar[0] == P.rho0);
  CHECK(st.endpoint_defect <= 1e-10);
  CHECK(st.residual_sup <= g.h * g.h);  // measured ~0.16 h^2
  for (int i = 1; i < g.n; ++i) CHECK(st.rho_bar[i] > st.rho_bar[i - 1]);
  CHECK(st.rho_bar[g.n - 1] <= P.rho1 + 1e-10);
}

TEST_CASE("profile integration error at the far end shrinks at fourth order") {
  // steep regime: eps = 0.05 eps0 gives a measurable RK4 endpoint defect
  const double eps = 0.05 * P.eps0;
  const double d101 = stationary_profile(P, eps, Grid(101)).endpoint_defect;
  const double d201 = stationary_profile(P, eps, Grid(201)).endpoint_defect;
  const double d401 = stationary_profile(P, eps, Grid(401)).endpoint_defect;
  CHECK(d101 <= 5e-11);  // measured 1.1e-11
  CHECK(d201 <= 5e-12);  // measured 7.2e-13
  CHECK(d401 <= 5e-13);  // measured 4.5e-14
  CHECK(d101 / d201 > 8.0);
  CHECK(d101 / d201 < 40.0);
}

TEST_CASE("balanced profile is the logistic curve") {
  Grid g(401);
  StationaryResult st = stationary_profile(P, P.eps0, g);
  Profile expect = testutil::logistic_rho(g, P);
  CHECK(sup_dist(st.rho_bar, expect) <= 1e-6);
  CHECK(st.rho_bar[200] == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("solver input validation") {
  CHECK_THROWS_AS(solve_current(P, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(solve_current(P, -0.1), std::invalid_argument);
}

TEST_CASE("inviscid stationary limit picks the heavier boundary") {
  Grid g(101);
  // balanced data: half-interval step, the midpoint node on the upper level
  Profile s = inviscid_stationary(P, g);
  CHECK(s[0] == P.rho0);
  CHECK(s[g.n - 1] == P.rho1);
  for (int i = 0; i < g.n; ++i) {
    const bool lower = g.x(i) < 0.5;
    CHECK(s[i] == (lower ? P.rho0 : P.rho1));
  }

  Params Q1(0.3, 0.6);  // rho0 + rho1 < 1: constant lower value
  Profile s1 = inviscid_stationary(Q1, g);
  for (int i = 0; i < g.n; ++i) CHECK(s1[i] == Q1.rho0);

  Params Q2(0.5, 0.8);  // rho0 + rho1 > 1: constant upper value
  Profile s2 = inviscid_stationary(Q2, g);
  for (int i = 0; i < g.n; ++i) CHECK(s2[i] == Q2.rho1);
}
