#include "bqp/stationary.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace bqp {

namespace {

constexpr double kPi = 3.14159265358979323846;

double flux(double r) { return r * (1.0 - r); }

// 64-point Gauss-Legendre nodes/weights on [-1,1], computed once by Newton
// iteration on the Legendre polynomial.
struct Gauss64 {
  double x[64];
  double w[64];
  Gauss64() {
    const int n = 64;
    for (int i = 0; i < n / 2; ++i) {
      double t = std::cos(kPi * (i + 0.75) / (n + 0.5));
      double p0, p1, dp;
      for (int it = 0; it < 100; ++it) {
        p0 = 1.0;
        p1 = t;
        for (int k = 2; k <= n; ++k) {
          const double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        dp = n * (t * p1 - p0) / (t * t - 1.0);
        const double dt = p1 / dp;
        t -= dt;
        if (std::fabs(dt) < 1e-16) break;
      }
      x[i] = -t;
      x[n - 1 - i] = t;
      w[i] = w[n - 1 - i] = 2.0 / ((1.0 - t * t) * dp * dp);
    }
  }
};

const Gauss64& gauss64() {
  static const Gauss64 g;
  return g;
}

double panel_integral(double a, double b, double eps, double J) {
  const Gauss64& g = gauss64();
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  double s = 0.0;
  for (int i = 0; i < 64; ++i) {
    const double r = mid + half * g.x[i];
    s += g.w[i] * eps / (flux(r) - J);
  }
  return s * half;
}

// integral_{rho0}^{rho1} eps/(f(r)-J) dr with panels graded toward both ends,
// where the integrand peaks as J approaches the bound.
double current_integral(const Params& P, double eps, double J) {
  const double L = P.rho1 - P.rho0;
  std::vector<double> cuts;
  cuts.push_back(0.0);
  for (double d = 0.5 * L; d > 1e-13 * L; d *= 0.5) cuts.push_back(d);
  // ascending cut positions from the left end, then mirrored from the right
  std::vector<double> pts;
  pts.push_back(P.rho0);
  for (std::size_t i = cuts.size(); i-- > 1;) pts.push_back(P.rho0 + cuts[i]);
  const double midpt = P.rho0 + 0.5 * L;
  pts.push_back(midpt);
  for (std::size_t i = 1; i < cuts.size(); ++i) pts.push_back(P.rho1 - cuts[i]);
  pts.push_back(P.rho1);

  double s = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i)
    if (pts[i + 1] > pts[i]) s += panel_integral(pts[i], pts[i + 1], eps, J);
  return s;
}

}  // namespace

double current_bound(const Params& P) {
  return std::min(flux(P.rho0), flux(P.rho1));
}

double solve_current(const Params& P, double eps, double tol) {
  if (!(eps > 0.0)) throw std::invalid_argument("solve_current: eps must be > 0");
  const double J0 = current_bound(P);
  double hi = J0 - 1e-14;
  double lo = J0 - eps * (P.rho1 - P.rho0) * 1e3;

  if (current_integral(P, eps, hi) <= 1.0)
    throw std::runtime_error(
        "solve_current: current indistinguishable from its bound at this eps");
  int guard = 0;
  while (current_integral(P, eps, lo) >= 1.0) {
    lo = J0 - 4.0 * (J0 - lo);
    if (++guard > 60)
      throw std::runtime_error("solve_current: bracket expansion failed");
  }

  for (int it = 0; it < 300; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double I = current_integral(P, eps, mid);
    if (std::fabs(I - 1.0) <= tol && hi - lo <= 1e-13 * std::max(1.0, std::fabs(mid)))
      return mid;
    if (I < 1.0)
      lo = mid;
    else
      hi = mid;
    if (hi - lo < 1e-16 * std::max(1.0, std::fabs(mid))) break;
  }
  return 0.5 * (lo + hi);
}

StationaryResult stationary_profile(const Params& P, double eps, const Grid& g,
                                    double current_tol) {
  StationaryResult out;
  out.current = solve_current(P, eps, current_tol);
  out.rho_bar = Profile(g);

  const double J = out.current;
  auto rhs = [&](double r) { return (flux(r) - J) / eps; };
  const int sub = 4;
  const double dh = g.h / sub;
  double r = P.rho0;
  out.rho_bar[0] = r;
  for (int i = 1; i < g.n; ++i) {
    for (int s = 0; s < sub; ++s) {
      const double k1 = rhs(r);
      const double k2 = rhs(r + 0.5 * dh * k1);
      const double k3 = rhs(r + 0.5 * dh * k2);
      const double k4 = rhs(r + dh * k3);
      r += dh / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      if (r < -0.05 || r > 1.05)
        throw std::runtime_error(
            "stationary_profile: integration left [0,1]; tighten the current tolerance");
    }
    out.rho_bar[i] = r;
  }
  out.endpoint_defect = std::fabs(out.rho_bar[g.n - 1] - P.rho1);

  const Profile d = ddx(out.rho_bar);
  for (int i = 0; i < g.n; ++i)
    out.residual_sup = std::max(
        out.residual_sup, std::fabs(flux(out.rho_bar[i]) - eps * d[i] - J));
  return out;
}

Profile inviscid_stationary(const Params& P, const Grid& g) {
  Profile out(g);
  const double d = 1.0 - (P.rho0 + P.rho1);
  if (d > 1e-12) {
    for (int i = 0; i < g.n; ++i) out[i] = P.rho0;
  } else if (d < -1e-12) {
    for (int i = 0; i < g.n; ++i) out[i] = P.rho1;
  } else {
    for (int i = 0; i < g.n; ++i) out[i] = (g.x(i) < 0.5) ? P.rho0 : P.rho1;
  }
  return out;
}

}  // namespace bqp
