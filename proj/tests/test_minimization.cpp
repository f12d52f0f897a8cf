#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"

#include "bqp/functionals.hpp"
#include "bqp/grid.hpp"
#include "bqp/inviscid.hpp"
#include "bqp/minimization.hpp"
#include "bqp/stationary.hpp"
#include "test_util.hpp"

using namespace bqp;

namespace {
const Params P(0.25, 0.75);
}

TEST_CASE("normalization constant closed form at the affine critical pair") {
  Grid g(201);
  Profile rho = testutil::affine_fp_density(g, P);
  Profile phi = testutil::affine_phi(g, P);

  KResult k = apply_k(rho, phi, 0.2, P);
  CHECK(k.a_const == doctest::Approx(0.2 / (P.eps0 - 0.2)).epsilon(1e-9));
  CHECK(k.a_const == doctest::Approx(0.783944).epsilon(2e-6));

  // near the balanced viscosity the constant blows up like eps/(eps0-eps)
  KResult k2 = apply_k(rho, phi, 0.999 * P.eps0, P);
  CHECK(k2.a_const > 900.0);
  CHECK(k2.a_const == doctest::Approx(999.0).epsilon(1e-3));
  CHECK(std::isfinite(k2.log_a));

  CHECK_THROWS_AS(apply_k(rho, phi, 0.0, P), std::invalid_argument);
}

TEST_CASE("the affine potential is a one-application fixed point") {
  Grid g(401);
  Profile rho = testutil::affine_fp_density(g, P);
  Profile phi = testutil::affine_phi(g, P);
  for (double f : {0.1, 0.95}) {
    const double eps = f * P.eps0;
    KResult k = apply_k(rho, phi, eps, P);
    CHECK(sup_dist(k.phi, phi) <= 1e-12);  // measured ~6e-14
    CHECK(std::fabs(k.a_const - eps / (P.eps0 - eps)) <= 1e-10);
    for (int i = 0; i < g.n; ++i)
      CHECK(k.phi_x[i] == doctest::Approx(P.mass()).epsilon(1e-10));
  }
}

TEST_CASE("picard terminates immediately on an exact fixed point") {
  Grid g(401);
  Profile rho = testutil::affine_fp_density(g, P);
  Profile phi = testutil::affine_phi(g, P);

  FixedPointResult lo = picard(rho, phi, 0.1 * P.eps0, P);
  CHECK(lo.converged);
  CHECK(lo.iterations <= 2);
  CHECK(sup_dist(lo.phi, phi) <= 1e-10);
  CHECK(lo.min_eig < 0.0);
  CHECK(lo.kind == "saddle");

  FixedPointResult hi = picard(rho, phi, 0.95 * P.eps0, P);
  CHECK(hi.converged);
  CHECK(hi.min_eig > 0.0);
  CHECK(hi.kind == "minimizer");
}

TEST_CASE("picard at the stationary density, defect shrinking second order") {
  const double eps = 0.3 * P.eps0;
  double el[2];
  int idx = 0;
  for (int n : {101, 201}) {
    Grid g(n);
    StationaryResult st = stationary_profile(P, eps, g);
    FixedPointResult fp = picard(st.rho_bar, testutil::affine_phi(g, P), eps, P);
    CHECK(fp.converged);
    CHECK(fp.kind == "minimizer");
    CHECK(fp.delta_observed > 0.1);  // measured 0.174: solution well inside the band
    CHECK(fp.delta_observed < 0.3);
    CHECK(fp.iterations >= 10);
    CHECK(fp.iterations <= 100);  // measured 34
    el[idx++] = fp.el_residual;
  }
  CHECK(el[0] <= 2e-4);  // measured 1.64e-4
  CHECK(el[1] <= 6e-5);  // measured 4.10e-5
  CHECK(el[0] / el[1] > 3.0);
  CHECK(el[0] / el[1] < 5.0);
}

TEST_CASE("picard requires an anchored seed") {
  Grid g(101);
  StationaryResult st = stationary_profile(P, 0.3 * P.eps0, g);
  CHECK_THROWS_AS(picard(st.rho_bar, Profile(g, 0.0), 0.3 * P.eps0, P),
                  std::invalid_argument);
}

TEST_CASE("gradient flow rejects seeds outside the slope band") {
  Grid g(101);
  StationaryResult st = stationary_profile(P, 0.3 * P.eps0, g);
  Profile seed(g);
  for (int i = 0; i < g.n; ++i) {
    const double x = g.x(i);
    seed[i] = P.phi0 + P.mass() * (x + 0.3 * std::sin(2.0 * M_PI * x));
  }
  // slope factor 1 + 0.6 pi cos dips below zero: not monotone
  CHECK_THROWS_AS(gradient_flow(st.rho_bar, seed, 0.3 * P.eps0, P),
                  std::invalid_argument);
}

TEST_CASE("three solvers agree on a smooth density") {
  Grid g(101);
  const double eps = 0.95 * P.eps0;
  Profile rho(g);
  for (int i = 0; i < g.n; ++i) {
    const double x = g.x(i);
    rho[i] = 0.5 + 0.15 * std::sin(2.0 * M_PI * x) + 0.05 * std::sin(M_PI * x);
  }
  Profile seed = testutil::affine_phi(g, P);

  FixedPointResult a = picard(rho, seed, eps, P);
  ContractionResult b = contraction_k1(rho, seed, eps, P);
  FlowResult c = gradient_flow(rho, seed, eps, P);
  REQUIRE(a.converged);
  REQUIRE(b.fp.converged);
  REQUIRE(c.converged);
  CHECK(sup_dist(a.phi, b.fp.phi) <= 1e-6);
  CHECK(sup_dist(a.phi, c.fp.phi) <= 1e-6);
  CHECK(sup_dist(b.fp.phi, c.fp.phi) <= 1e-6);
  CHECK(b.contraction_factor < 1.0);
  CHECK(c.max_step_increase <= 1e-10);  // descent up to the stated slack
}

TEST_CASE("second contraction map on a narrow boundary gap") {
  Params Q(0.4750208, 0.5249792);  // mass 0.2, well below the gap threshold
  Grid g(101);
  Profile rho(g, 0.5);
  Profile s1 = testutil::affine_phi(g, Q);
  Profile s2 = smoothed_step(g, Q, 0.3, 1.0);
  ContractionResult c1 = contraction_k2(rho, s1, 1.0, Q);
  ContractionResult c2 = contraction_k2(rho, s2, 1.0, Q);
  REQUIRE(c1.fp.converged);
  REQUIRE(c2.fp.converged);
  CHECK(c1.contraction_factor < 0.05);  // measured 0.0011
  CHECK(c2.contraction_factor < 0.05);  // measured 0.0045
  CHECK(sup_dist(c1.fp.phi, c2.fp.phi) <= 1e-12);
}

TEST_CASE("gradient flow stays put when started at the fixed point") {
  Grid g(201);
  const double eps = 0.3 * P.eps0;
  Profile rho = testutil::affine_fp_density(g, P);
  Profile phi = testutil::affine_phi(g, P);
  FlowResult r = gradient_flow(rho, phi, eps, P);
  CHECK(r.converged);
  CHECK(r.steps == 0);  // dissipation already below threshold
  CHECK(r.max_step_increase == 0.0);
  CHECK(sup_dist(r.fp.phi, phi) <= 1e-12);
}

TEST_CASE("gradient flow reaches the picard fixed point from a step seed") {
  Grid g(201);
  const double eps = 0.3 * P.eps0;
  StationaryResult st = stationary_profile(P, eps, g);
  FixedPointResult ref = picard(st.rho_bar, testutil::affine_phi(g, P), eps, P);
  FlowResult r = gradient_flow(st.rho_bar, smoothed_step(g, P, 0.3, eps), eps, P);
  REQUIRE(r.converged);
  CHECK(r.max_step_increase <= 1e-10);
  CHECK(sup_dist(r.fp.phi, ref.phi) <= 1e-6);
}

TEST_CASE("mollified step seeds stay inside the slope band away from eps0") {
  Grid g(201);
  for (double f : {0.05, 0.3, 0.5, 0.9}) {
    const double eps = f * P.eps0;
    for (double y : {0.1, 0.5, 0.9}) {
      Profile s = smoothed_step(g, P, y, eps);
      CHECK(std::fabs(s[0] - P.phi0) <= 1e-12);
      CHECK(std::fabs(s[g.n - 1] - P.phi1) <= 1e-12);
      Profile sx = ddx(s);
      for (int i = 0; i < g.n; ++i) {
        CHECK(eps * sx[i] >= -1e-12);
        CHECK(eps * sx[i] <= 0.99);  // capped at 0.98 by construction
      }
    }
  }
  // at eps0 the band degenerates to the affine profile; the seed keeps its
  // anchors and monotonicity but may exceed the bound
  Profile s = smoothed_step(g, P, 0.5, P.eps0);
  CHECK(std::fabs(s[0] - P.phi0) <= 1e-12);
  CHECK(std::fabs(s[g.n - 1] - P.phi1) <= 1e-12);
  for (int i = 1; i < g.n; ++i) CHECK(s[i] >= s[i - 1] - 1e-12);
}

TEST_CASE("enumeration returns a single basin at the stationary density") {
  for (int n : {101, 201}) {
    Grid g(n);
    StationaryResult st = stationary_profile(P, 0.3 * P.eps0, g);
    auto fps = enumerate_fixed_points(st.rho_bar, 0.3 * P.eps0, P);
    REQUIRE(fps.size() == 1);
    CHECK(fps[0].kind == "minimizer");
    CHECK(fps[0].converged);
  }
}

TEST_CASE("enumeration resolves the double well and its saddle") {
  Grid g(201);
  const double eps = 0.05 * P.eps0;
  TransitionGeometry geom;
  Thresholds th = thresholds(P);
  const double amp = 0.6 * std::min(th.a - th.a_minus, th.a_plus - th.a);
  Profile rho = build_test_density(g, P, geom, amp);

  auto fps = enumerate_fixed_points(rho, eps, P);
  REQUIRE(fps.size() == 3);
  CHECK(fps[0].g_value == doctest::Approx(-1.666521466).epsilon(5e-6));
  CHECK(std::fabs(fps[0].g_value - fps[1].g_value) <= 1e-6);  // mirror pair
  CHECK(fps[0].kind == "minimizer");
  CHECK(fps[1].kind == "minimizer");
  CHECK(fps[2].g_value == doctest::Approx(-1.662216708).epsilon(5e-6));
  CHECK(fps[2].g_value - fps[0].g_value > 3e-3);
  CHECK(sup_dist(fps[0].phi, fps[1].phi) > 0.5);  // genuinely distinct wells
}

TEST_CASE("the affine saddle loses to an asymmetric competitor at low viscosity") {
  Grid g(201);
  const double eps = 0.1 * P.eps0;
  Profile rho = testutil::affine_fp_density(g, P);
  auto fps = enumerate_fixed_points(rho, eps, P);
  REQUIRE(fps.size() >= 2);

  const Profile aff = testutil::affine_phi(g, P);
  double affine_g = 0.0;
  bool found_affine = false;
  for (const auto& fp : fps) {
    if (sup_dist(fp.phi, aff) <= 1e-6) {
      affine_g = fp.g_value;
      found_affine = true;
    }
  }
  REQUIRE(found_affine);
  CHECK(fps[0].g_value < affine_g - 1e-4);  // measured gap 4.6e-4
  CHECK(sup_dist(fps[0].phi, aff) > 0.1);
}

TEST_CASE("quasi-potential vanishes at the stationary profile") {
  Grid g(101);
  const double eps = 0.3 * P.eps0;
  StationaryResult st = stationary_profile(P, eps, g);
  MinimizationReport r = quasi_potential(st.rho_bar, eps, P);
  CHECK(r.s_eps == 0.0);  // same minimization on both sides
  CHECK(r.n_minimizers == 1);
  CHECK(r.s_naught == r.s_naught_stationary);
}

TEST_CASE("quasi-potential of the sine density") {
  Grid g(201);
  MinimizationReport r = quasi_potential(testutil::sine_density(g),
                                         0.3 * P.eps0, P);
  CHECK(r.s_eps == doctest::Approx(0.168955897).epsilon(1e-5));
  CHECK(r.s_eps > 0.0);
  CHECK(r.n_minimizers == 1);
}

TEST_CASE("seed bank contains the documented families") {
  Grid g(101);
  StationaryResult st = stationary_profile(P, 0.3 * P.eps0, g);
  auto seeds = build_seed_bank(st.rho_bar, 0.3 * P.eps0, P);
  CHECK(seeds.size() >= 10);  // affine + entropy seed + 9 steps + envelope
  for (const auto& s : seeds) {
    CHECK(std::fabs(s[0] - P.phi0) <= 1e-9);
    CHECK(std::fabs(s[g.n - 1] - P.phi1) <= 1e-9);
  }
}
