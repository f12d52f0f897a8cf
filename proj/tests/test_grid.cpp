#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <vector>

#include "doctest.h"

#include "bqp/grid.hpp"

using namespace bqp;

TEST_CASE("grid construction and validation") {
  Grid g(101);
  CHECK(g.n == 101);
  CHECK(g.h == doctest::Approx(0.01).epsilon(1e-15));
  CHECK(g.x(0) == 0.0);
  CHECK(g.x(100) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(Grid(3).n == 3);
  CHECK_THROWS_AS(Grid(2), std::invalid_argument);

  CHECK_THROWS_AS(Profile(g, std::vector<double>(100, 0.0)),
                  std::invalid_argument);
  CHECK_THROWS_AS(Params(0.7, 0.3), std::invalid_argument);
  CHECK_THROWS_AS(Params(0.0, 0.5), std::invalid_argument);

  Params P(0.25, 0.75);
  CHECK(P.phi0 == doctest::Approx(-std::log(3.0)).epsilon(1e-15));
  CHECK(P.phi1 == doctest::Approx(std::log(3.0)).epsilon(1e-15));
  CHECK(P.mass() == doctest::Approx(2.0 * std::log(3.0)).epsilon(1e-15));
  CHECK(P.eps0 == doctest::Approx(1.0 / (2.0 * std::log(3.0))).epsilon(1e-15));
  CHECK(P.phibar() == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("trapezoid rule is exact on linear data") {
  Grid g(11);
  Profile p(g);
  for (int i = 0; i < g.n; ++i) p[i] = 2.0 + 3.0 * g.x(i);
  CHECK(integrate(p) == doctest::Approx(3.5).epsilon(1e-15));
  Profile c(g, 1.0);
  CHECK(integrate(c) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("trapezoid error on a quadratic is exactly h^2/6") {
  // composite rule overestimates int x^2 by (b-a) h^2 f''/12 = h^2/6
  for (int n : {11, 101}) {
    Grid g(n);
    Profile p(g);
    for (int i = 0; i < g.n; ++i) p[i] = g.x(i) * g.x(i);
    const double err = integrate(p) - 1.0 / 3.0;
    CHECK(err == doctest::Approx(g.h * g.h / 6.0).epsilon(1e-10));
  }
}

TEST_CASE("cumulative trapezoid matches the full integral") {
  Grid g(21);
  Profile p(g);
  for (int i = 0; i < g.n; ++i) p[i] = std::exp(g.x(i));
  const std::vector<double> cum = cum_integrate(p);
  CHECK(cum[0] == 0.0);
  CHECK(cum.back() == doctest::Approx(integrate(p)).epsilon(1e-15));
  for (int i = 1; i < g.n; ++i) CHECK(cum[i] > cum[i - 1]);  // positive data
  // vector overload agrees
  const std::vector<double> cum2 = cum_integrate(g, p.v);
  for (int i = 0; i < g.n; ++i) CHECK(cum2[i] == cum[i]);
}

TEST_CASE("first derivative is exact on quadratics including the ends") {
  Grid g(17);
  Profile p(g);
  for (int i = 0; i < g.n; ++i) p[i] = 1.5 + 0.25 * g.x(i) + g.x(i) * g.x(i);
  Profile d = ddx(p);
  for (int i = 0; i < g.n; ++i)
    CHECK(d[i] == doctest::Approx(0.25 + 2.0 * g.x(i)).epsilon(1e-12));
}

TEST_CASE("second derivative is exact on quadratics, end values copied") {
  Grid g(17);
  Profile p(g);
  for (int i = 0; i < g.n; ++i) p[i] = 3.0 * g.x(i) * g.x(i) - g.x(i);
  Profile d2 = d2dx2(p);
  for (int i = 1; i < g.n - 1; ++i)
    CHECK(d2[i] == doctest::Approx(6.0).epsilon(1e-10));
  CHECK(d2[0] == d2[1]);
  CHECK(d2[g.n - 1] == d2[g.n - 2]);
}

TEST_CASE("derivative error on a sine shrinks at second order") {
  double err[2];
  int idx = 0;
  for (int n : {51, 101}) {
    Grid g(n);
    Profile p(g);
    for (int i = 0; i < g.n; ++i) p[i] = std::sin(M_PI * g.x(i));
    Profile d = ddx(p);
    double e = 0.0;
    for (int i = 0; i < g.n; ++i)
      e = std::max(e, std::fabs(d[i] - M_PI * std::cos(M_PI * g.x(i))));
    // centered interior bound pi^3 h^2 / 6; one-sided ends are h^2 too
    CHECK(e <= M_PI * M_PI * M_PI * g.h * g.h);
    err[idx++] = e;
  }
  CHECK(err[0] / err[1] > 3.0);
  CHECK(err[0] / err[1] < 5.0);
}

TEST_CASE("integral of the derivative telescopes on a quadratic") {
  Grid g(41);
  Profile p(g);
  for (int i = 0; i < g.n; ++i) p[i] = 0.7 * g.x(i) * g.x(i) + 0.1;
  // ddx is exact (linear), and the trapezoid is exact on linear data
  CHECK(integrate(ddx(p)) ==
        doctest::Approx(p[g.n - 1] - p[0]).epsilon(1e-13));
}

TEST_CASE("sup and l1 distances") {
  Grid g(3);
  Profile a(g), b(g);
  a[0] = 0.0; a[1] = 0.5; a[2] = 1.0;
  b[0] = 0.0; b[1] = 0.0; b[2] = 0.0;
  CHECK(sup_dist(a, b) == 1.0);
  CHECK(l1_dist(a, b) == doctest::Approx(0.5).epsilon(1e-15));  // trap of |x|
  CHECK(sup_norm(a.v) == 1.0);
  Grid g2(5);
  CHECK_THROWS_AS(sup_dist(a, Profile(g2)), std::invalid_argument);
  CHECK_THROWS_AS(l1_dist(a, Profile(g2)), std::invalid_argument);
}

TEST_CASE("profile csv round trip is bit exact") {
  Grid g(7);
  Profile p(g);
  p[0] = 0.1;
  p[1] = -3.25e-17;
  p[2] = 1.0 / 3.0;
  p[3] = 0.0;
  p[4] = 123456.789012345;
  p[5] = -0.9999999999999999;
  p[6] = 5e-300;
  const std::string path = "grid_roundtrip_tmp.csv";
  write_profile_csv(p, path);
  Profile q = read_profile_csv(path);
  REQUIRE(q.n() == p.n());
  for (int i = 0; i < p.n(); ++i) CHECK(q[i] == p[i]);
  std::remove(path.c_str());
}

TEST_CASE("profile csv rejects bad headers and non-uniform nodes") {
  const std::string path = "grid_badcsv_tmp.csv";
  {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    REQUIRE(f != nullptr);
    std::fputs("wrong,header\n0,1\n", f);
    std::fclose(f);
  }
  CHECK_THROWS_AS(read_profile_csv(path), std::runtime_error);
  {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    REQUIRE(f != nullptr);
    std::fputs("x,value\n0,1\n0.3,1\n1,1\n", f);  // nodes not uniform
    std::fclose(f);
  }
  CHECK_THROWS_AS(read_profile_csv(path), std::runtime_error);
  CHECK_THROWS_AS(read_profile_csv("no_such_file_tmp.csv"), std::runtime_error);
  std::remove(path.c_str());
}
