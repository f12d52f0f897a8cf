#include <cmath>
#include <random>
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

Profile two_well(const Grid& g, const TransitionGeometry& geom = {}) {
  Thresholds th = thresholds(P);
  const double amp = 0.6 * std::min(th.a - th.a_minus, th.a_plus - th.a);
  return build_test_density(g, P, geom, amp);
}

}  // namespace

TEST_CASE("mean-density thresholds have their closed forms") {
  Thresholds th = thresholds(P);
  CHECK(std::fabs(th.a - 0.5) <= 1e-12);  // symmetric data
  CHECK(th.a_plus ==
        doctest::Approx(1.0 - std::log(1.5) / std::log(3.0)).epsilon(1e-12));
  CHECK(th.a_minus ==
        doctest::Approx(1.0 - std::log(2.0) / std::log(3.0)).epsilon(1e-12));
  CHECK(th.a_plus == doctest::Approx(0.630930).epsilon(2e-6));
  CHECK(th.a_minus == doctest::Approx(0.369070).epsilon(2e-6));
  CHECK(th.a_plus + th.a_minus == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(th.phibar == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("threshold ordering holds across random boundary data") {
  std::mt19937 rng(42);
  std::uniform_real_distribution<double> U(0.02, 0.98);
  for (int t = 0; t < 100; ++t) {
    double a = U(rng), b = U(rng);
    if (a > b) std::swap(a, b);
    if (b - a < 1e-3) continue;
    Thresholds th = thresholds(Params(a, b));
    CHECK(0.0 < th.a_minus);
    CHECK(th.a_minus < th.a);
    CHECK(th.a < th.a_plus);
    CHECK(th.a_plus < 1.0);
  }
}

TEST_CASE("step potential switches levels at the jump") {
  Grid g(101);
  Profile s = step_phi(g, P, 0.37);
  for (int i = 0; i < g.n; ++i)
    CHECK(s[i] == (g.x(i) < 0.37 ? P.phi0 : P.phi1));
  // jump outside the interval degenerates to the constant levels
  CHECK(step_phi(g, P, 1.5)[g.n - 1] == P.phi0);
  CHECK(step_phi(g, P, 0.0)[0] == P.phi1);
}

TEST_CASE("two-well density: pins, band, and lobe balance") {
  Grid g(201);
  TransitionGeometry geom;
  Thresholds th = thresholds(P);
  Profile rho = two_well(g, geom);

  // marked points sit on nodes for this grid and carry the mean value
  CHECK(rho[50] == doctest::Approx(th.a).epsilon(1e-12));
  CHECK(rho[100] == doctest::Approx(th.a).epsilon(1e-12));
  CHECK(rho[150] == doctest::Approx(th.a).epsilon(1e-12));
  for (int i = 0; i < g.n; ++i) {
    CHECK(rho[i] > th.a_minus);
    CHECK(rho[i] < th.a_plus);
  }
  // discrete balance of the middle window [y-, y+]
  double s = 0.5 * (rho[50] - th.a) + 0.5 * (rho[150] - th.a);
  for (int i = 51; i < 150; ++i) s += rho[i] - th.a;
  CHECK(std::fabs(s * g.h) <= 1e-12);

  const double margin = std::min(th.a - th.a_minus, th.a_plus - th.a);
  CHECK_THROWS(build_test_density(g, P, geom, 1.01 * margin));
}

TEST_CASE("raised cosine bump is normalized and supported in its window") {
  Grid g(201);
  Profile b = raised_cosine_bump(g, 0.25, 0.5);
  for (int i = 0; i < g.n; ++i) {
    CHECK(b[i] >= 0.0);
    if (g.x(i) <= 0.25 - 1e-12 || g.x(i) >= 0.5 + 1e-12) CHECK(b[i] == 0.0);
  }
  CHECK(integrate(b) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(raised_cosine_bump(g, 0.5, 0.25), std::invalid_argument);
}

TEST_CASE("single-jump minimization: flat family at the balanced density") {
  Grid g(201);
  Profile half(g, 0.5);
  InviscidMin m = minimize_inviscid(half, P);
  CHECK(m.flat);
  CHECK(m.argmins.size() > 100);  // entire mesh returned
  CHECK(m.value ==
        doctest::Approx(-3.0 * std::log(2.0) + 0.5 * std::log(3.0))
            .epsilon(1e-9));
}

TEST_CASE("single-jump minimization: two tied wells, broken by a perturbation") {
  Grid g(201);
  TransitionGeometry geom;
  Profile rho = two_well(g, geom);
  InviscidMin m = minimize_inviscid(rho, P);
  CHECK(!m.flat);
  REQUIRE(m.argmins.size() == 2);
  CHECK(m.argmins[0] == doctest::Approx(0.25).epsilon(1e-3));
  CHECK(m.argmins[1] == doctest::Approx(0.75).epsilon(1e-3));
  CHECK(m.value == doctest::Approx(-1.551414215).epsilon(1e-6));

  Profile bump = raised_cosine_bump(g, geom.y_minus, geom.y0);
  Profile pert = rho;
  for (int i = 0; i < g.n; ++i) pert[i] += 0.003 * bump[i];
  InviscidMin mp = minimize_inviscid(pert, P);
  CHECK(!mp.flat);
  REQUIRE(mp.argmins.size() == 1);
  CHECK(mp.argmins[0] == doctest::Approx(0.25).epsilon(1e-3));
}

TEST_CASE("inviscid quasi-potential vanishes at the limiting profile") {
  Grid g(201);
  CHECK(std::fabs(inviscid_s(inviscid_stationary(P, g), P)) <= 1e-12);
  CHECK(inviscid_s(testutil::sine_density(g), P) ==
        doctest::Approx(0.18400058909261974).epsilon(1e-9));
}

TEST_CASE("coexistence function is balanced for the symmetric two-well") {
  Grid g(201);
  TransitionGeometry geom;
  Profile rho = two_well(g, geom);
  Profile bump = raised_cosine_bump(g, geom.y_minus, geom.y0);
  const double eps = 0.05 * P.eps0;

  CHECK(std::fabs(g_alpha(rho, bump, 0.0, eps, P, geom)) <= 1e-10);
  const double gm = g_alpha(rho, bump, -0.005, eps, P, geom);
  const double gp = g_alpha(rho, bump, +0.005, eps, P, geom);
  CHECK(gm < -1e-3);  // measured -7.66e-3
  CHECK(gp > +1e-3);  // measured +8.72e-3

  // an asymmetric density shifts the balance away from zero
  Profile pert = rho;
  for (int i = 0; i < g.n; ++i) pert[i] += 0.003 * bump[i];
  const double gu = g_alpha(pert, bump, 0.0, eps, P, geom);
  CHECK(gu > 1e-3);  // measured +5.16e-3
  CHECK(gu < 2e-2);
}

TEST_CASE("transition root, separation, and degeneracy at deep viscosity") {
  Grid g(201);
  TransitionGeometry geom;
  Profile rho = two_well(g, geom);
  Profile bump = raised_cosine_bump(g, geom.y_minus, geom.y0);

  TransitionReport tr = find_transition(rho, bump, 0.005, 0.05 * P.eps0, P, geom);
  CHECK(std::fabs(tr.alpha0) <= 1e-6);  // symmetric case: root at zero
  CHECK(tr.separation > 1.8);           // measured 1.92
  CHECK(tr.separation < 2.1);
  CHECK(tr.separation > 0.1 * P.mass());
  CHECK(std::fabs(tr.minimizer_minus.g_value - tr.minimizer_plus.g_value) <=
        1e-6);
  CHECK(tr.minimizer_minus.kind == "minimizer");
  CHECK(tr.minimizer_plus.kind == "minimizer");
  CHECK(tr.g_trace.size() >= 2);
}

TEST_CASE("no transition in the single-basin regime near eps0") {
  Grid g(201);
  TransitionGeometry geom;
  Profile rho = two_well(g, geom);
  Profile bump = raised_cosine_bump(g, geom.y_minus, geom.y0);

  CHECK_THROWS_AS(find_transition(rho, bump, 0.005, 0.9 * P.eps0, P, geom),
                  std::runtime_error);
  BifurcationRow row = bifurcation_point(rho, bump, 0.005, 0.9 * P.eps0, P, geom);
  CHECK(!row.bracket_ok);
  CHECK(!row.note.empty());
  CHECK(row.n_minimizers == 0);
  CHECK(std::isnan(row.alpha0));
}

TEST_CASE("bifurcation scan orders its rows and records outcomes") {
  Grid g(201);
  TransitionGeometry geom;
  Profile rho = two_well(g, geom);
  Profile bump = raised_cosine_bump(g, geom.y_minus, geom.y0);
  auto rows = bifurcation_scan(rho, bump, 0.005,
                               {0.9 * P.eps0, 0.05 * P.eps0}, P, geom);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].eps == doctest::Approx(0.9 * P.eps0).epsilon(1e-12));
  CHECK(!rows[0].bracket_ok);
  CHECK(rows[1].bracket_ok);
  CHECK(rows[1].n_minimizers == 2);
  CHECK(std::fabs(rows[1].alpha0) <= 1e-6);
}

TEST_CASE("viscosity scan rows are internally consistent") {
  Grid g(201);
  Profile rho = testutil::sine_density(g);
  GammaScanReport rep = gamma_scan(rho, {0.4 * P.eps0, 0.2 * P.eps0}, P);
  REQUIRE(rep.rows.size() == 2);
  CHECK(rep.s_inviscid ==
        doctest::Approx(0.18400058909261974).epsilon(1e-9));
  REQUIRE(rep.inviscid_argmins.size() == 2);
  CHECK(rep.inviscid_argmins[0] == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(rep.inviscid_argmins[1] == doctest::Approx(1.0).epsilon(1e-9));
  for (const auto& row : rep.rows) {
    CHECK(row.gap ==
          doctest::Approx(std::fabs(row.s_eps - row.s_inviscid)).epsilon(1e-12));
    CHECK(row.s_inviscid == doctest::Approx(rep.s_inviscid).epsilon(1e-12));
    CHECK(row.sup_dist > 2.0);  // minimizer is far from any single-jump profile
    CHECK(row.sup_dist < 2.3);
    CHECK(row.l1_dist > 0.0);
  }
  CHECK(rep.rows[0].eps == doctest::Approx(0.4 * P.eps0).epsilon(1e-12));
  CHECK(rep.rows[0].s_eps == doctest::Approx(0.165467).epsilon(1e-4));
  CHECK(rep.rows[1].s_eps == doctest::Approx(0.176416).epsilon(1e-4));
  CHECK(rep.gap_monotone);
}
