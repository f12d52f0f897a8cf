#include "bqp/selftest.hpp"

#include <cmath>
#include <ostream>
#include <vector>

#include "bqp/functionals.hpp"
#include "bqp/grid.hpp"
#include "bqp/inviscid.hpp"
#include "bqp/minimization.hpp"
#include "bqp/stationary.hpp"
#include "bqp/tridiag.hpp"

namespace bqp {

namespace {

struct Suite {
  std::ostream& out;
  bool all_ok = true;

  void check(const char* name, double value, double target, double tol) {
    const double err = std::fabs(value - target);
    const bool ok = err <= tol;
    all_ok = all_ok && ok;
    out << (ok ? "PASS " : "FAIL ") << name << "  value=" << value
        << "  target=" << target << "  |err|=" << err << "  tol=" << tol
        << "\n";
  }

  void check_true(const char* name, bool ok, const char* detail) {
    all_ok = all_ok && ok;
    out << (ok ? "PASS " : "FAIL ") << name << "  " << detail << "\n";
  }
};

}  // namespace

bool run_selftest(std::ostream& out) {
  Suite s{out};
  const double log3 = std::log(3.0);
  const Params P(0.25, 0.75);

  s.check("eps0 = 1/(phi1 - phi0)", P.eps0, 1.0 / (2.0 * log3), 1e-15);
  s.check("entropy_prime(0.75) = log 3", entropy_prime(0.75), log3, 1e-15);
  s.check("entropy(0.5) = -log 2", entropy(0.5), -std::log(2.0), 1e-15);
  s.check("mobility bound = 3/16", current_bound(P), 3.0 / 16.0, 1e-15);
  s.check("current vanishes at eps0", solve_current(P, P.eps0), 0.0, 1e-10);

  {
    const Grid g(401);
    const StationaryResult st = stationary_profile(P, P.eps0, g);
    double err = 0.0;
    for (int i = 0; i < g.n; ++i)
      err = std::max(err,
                     std::fabs(st.rho_bar[i] - sigmoid(g.x(i) / P.eps0 - log3)));
    s.check("stationary profile is the logistic at eps0", err, 0.0, 1e-6);
  }

  {
    const Thresholds t = thresholds(P);
    s.check("threshold A (symmetric data)", t.a, 0.5, 1e-12);
    s.check("threshold A+", t.a_plus, 1.0 - std::log(1.5) / log3, 1e-12);
    s.check("threshold A-", t.a_minus, 1.0 - std::log(2.0) / log3, 1e-12);
  }

  {
    const Grid g(101);
    const Profile rho(g, 0.5);
    double lo = 1e300, hi = -1e300;
    for (int k = 0; k <= 200; ++k) {
      const double v = g_tilde(rho, k / 200.0, P);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    s.check("single-jump landscape flat at rho = A", hi - lo, 0.0, 1e-9);
    s.check("its value", lo, -3.0 * std::log(2.0) + 0.5 * log3, 1e-9);
  }

  {
    // rho = 1/(1+e^phi) with affine phi kills the reaction term nodally,
    // so the normalization constant has the closed form eps/(eps0 - eps)
    const Grid g(201);
    const double eps = 0.2;
    Profile rho(g), phi(g);
    for (int i = 0; i < g.n; ++i) {
      phi[i] = P.phi0 + (P.phi1 - P.phi0) * g.x(i);
      rho[i] = sigmoid(-phi[i]);
    }
    const KResult k = apply_k(rho, phi, eps, P);
    const double target = eps / (P.eps0 - eps);
    s.check("normalization constant at the affine fixed point",
            k.a_const / target, 1.0, 1e-10);
    s.check("one K application returns the affine profile",
            sup_dist(k.phi, phi), 0.0, 1e-10);
  }

  {
    const std::vector<double> a{0.0, -1.0, -1.0}, b{2.0, 2.0, 2.0},
        c{-1.0, -1.0, 0.0}, d{1.0, 0.0, 1.0};
    const std::vector<double> sol = solve_tridiagonal(a, b, c, d);
    const double err = std::max({std::fabs(sol[0] - 1.0), std::fabs(sol[1] - 1.0),
                                 std::fabs(sol[2] - 1.0)});
    s.check("tridiagonal solve on a known system", err, 0.0, 1e-14);
  }

  {
    const Grid g(101);
    const double eps = 0.9 * P.eps0;
    Profile rho(g), affine(g);
    for (int i = 0; i < g.n; ++i) {
      affine[i] = P.phi0 + (P.phi1 - P.phi0) * g.x(i);
      rho[i] = sigmoid(-affine[i]);
    }
    Profile seed = affine;
    for (int i = 0; i < g.n; ++i) {
      const double x = g.x(i);
      seed[i] += 0.02 * std::sin(3.14159265358979323846 * x);
    }
    const FixedPointResult fp = picard(rho, seed, eps, P);
    s.check_true("fixed-point solve recovers the affine profile",
                 fp.converged && sup_dist(fp.phi, affine) <= 1e-6,
                 "picard from a perturbed seed");
  }

  out << (s.all_ok ? "selftest: all checks passed\n"
                   : "selftest: FAILURES present\n");
  return s.all_ok;
}

}  // namespace bqp
