#include "bqp/functionals.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace bqp {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kSlopeSlack = 1e-12;  // domain slack for eps*phi_x in [0,1]
}  // namespace

double entropy(double a) {
  if (a < 0.0 || a > 1.0) return kInf;
  double s = 0.0;
  if (a > 1e-300) s += a * std::log(a);
  const double b = 1.0 - a;
  if (b > 1e-300) s += b * std::log1p(-a);
  return s;
}

double entropy_prime(double a) {
  if (!(a > 0.0 && a < 1.0))
    throw std::domain_error("entropy_prime: argument must lie in (0,1)");
  return std::log(a / (1.0 - a));
}

double sigmoid(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

double softplus(double t) {
  if (t > 0.0) return t + std::log1p(std::exp(-t));
  return std::log1p(std::exp(t));
}

double g_eps_with_slope(const Profile& rho, const Profile& phi,
                        const std::vector<double>& phi_x, double eps) {
  if (rho.grid != phi.grid)
    throw std::invalid_argument("g_eps: grid mismatch");
  const int n = rho.n();
  Profile integrand(rho.grid);
  for (int i = 0; i < n; ++i) {
    double m = eps * phi_x[i];
    if (m < -kSlopeSlack || m > 1.0 + kSlopeSlack) return kInf;
    m = std::min(1.0, std::max(0.0, m));
    const double se = entropy(rho[i]);
    if (se == kInf) return kInf;
    integrand[i] = se + entropy(m) + (1.0 - rho[i]) * phi[i] - softplus(phi[i]);
  }
  return integrate(integrand);
}

double g_eps(const Profile& rho, const Profile& phi, double eps) {
  return g_eps_with_slope(rho, phi, ddx(phi).v, eps);
}

double lambda_functional(const Profile& phi, double eps) {
  const std::vector<double> phi_x = ddx(phi).v;
  const int n = phi.n();
  Profile integrand(phi.grid);
  for (int i = 0; i < n; ++i) {
    double m = eps * phi_x[i];
    if (m < -kSlopeSlack || m > 1.0 + kSlopeSlack) return kInf;
    m = std::min(1.0, std::max(0.0, m));
    integrand[i] = entropy(m) + phi[i] - softplus(phi[i]);
  }
  return integrate(integrand);
}

double g_inviscid(const Profile& rho, const Profile& phi) {
  if (rho.grid != phi.grid)
    throw std::invalid_argument("g_inviscid: grid mismatch");
  Profile integrand(rho.grid);
  for (int i = 0; i < rho.n(); ++i) {
    const double se = entropy(rho[i]);
    if (se == kInf) return kInf;
    integrand[i] = se + (1.0 - rho[i]) * phi[i] - softplus(phi[i]);
  }
  return integrate(integrand);
}

double g_tilde(const Profile& rho, double y, const Params& P) {
  if (y < 0.0 || y > 1.0) throw std::invalid_argument("g_tilde: y outside [0,1]");
  const Grid& g = rho.grid;
  const int n = g.n;

  Profile ent(g), one_minus(g);
  for (int i = 0; i < n; ++i) {
    const double se = entropy(rho[i]);
    if (se == kInf) throw std::invalid_argument("g_tilde: rho outside [0,1]");
    ent[i] = se;
    one_minus[i] = 1.0 - rho[i];
  }
  const std::vector<double> cum = cum_integrate(one_minus);
  const double total = cum[n - 1];

  // integral of (1-rho) over [0,y], splitting the containing cell exactly
  int k = static_cast<int>(std::floor(y / g.h));
  if (k >= n - 1) k = n - 2;
  const double xk = g.x(k);
  const double t = (y - xk) / g.h;
  const double rho_y = rho[k] + t * (rho[k + 1] - rho[k]);
  const double part =
      cum[k] + (y - xk) * (1.0 - 0.5 * (rho[k] + rho_y));

  return integrate(ent) + P.phi0 * part + P.phi1 * (total - part) -
         y * softplus(P.phi0) - (1.0 - y) * softplus(P.phi1);
}

double second_variation_value(const Profile& phi, double eps, const Profile& h) {
  if (phi.grid != h.grid)
    throw std::invalid_argument("second_variation_value: grid mismatch");
  if (std::fabs(h[0]) > 1e-12 || std::fabs(h[h.n() - 1]) > 1e-12)
    throw std::invalid_argument("second_variation_value: h must vanish at the ends");
  const std::vector<double> px = ddx(phi).v;
  const std::vector<double> hx = ddx(h).v;
  Profile integrand(phi.grid);
  for (int i = 0; i < phi.n(); ++i) {
    double m = eps * px[i];
    if (m < -1e-9 || m > 1.0 + 1e-9)
      throw std::runtime_error("second_variation_value: slope leaves [0, 1/eps]");
    m = std::min(1.0 - 1e-12, std::max(1e-12, m));
    const double den = m * (1.0 - m) / eps;
    const double p = sigmoid(phi[i]);
    integrand[i] = eps * hx[i] * hx[i] / den - p * (1.0 - p) * h[i] * h[i];
  }
  return integrate(integrand);
}

namespace {

// Eigenvalues of (T - lambda * hI) below mu, by the pivot-sign count of the
// LDL^T factorization of T - mu*h*I.
int sturm_count(const std::vector<double>& diag, const std::vector<double>& off,
                double h, double mu) {
  const std::size_t m = diag.size();
  int count = 0;
  double q = diag[0] - mu * h;
  if (q == 0.0) q = -1e-300;
  if (q < 0.0) ++count;
  for (std::size_t i = 1; i < m; ++i) {
    q = (diag[i] - mu * h) - off[i - 1] * off[i - 1] / q;
    if (q == 0.0) q = -1e-300;
    if (q < 0.0) ++count;
  }
  return count;
}

}  // namespace

double second_variation_min_eig(const Profile& phi,
                                const std::vector<double>& phi_x, double eps,
                                double* scale_out) {
  const int n = phi.n();
  const double h = phi.grid.h;

  // Stiffness weight on cells, potential on nodes.  At eps = eps0 a fixed
  // point can touch the slope-band boundary, where the weight diverges to
  // +inf (an infinitely stiff, hence stable, direction); clamp instead of
  // rejecting, and only reject slopes genuinely outside the band.
  std::vector<double> w(n);
  for (int i = 0; i < n; ++i) {
    double m = eps * phi_x[i];
    if (m < -1e-9 || m > 1.0 + 1e-9)
      throw std::runtime_error(
          "second_variation_min_eig: eps*phi_x leaves [0,1]");
    m = std::min(1.0 - 1e-12, std::max(1e-12, m));
    w[i] = eps * eps / (m * (1.0 - m));
  }

  // interior nodes 1..n-2; lumped mass h per node
  const int m = n - 2;
  std::vector<double> diag(m), off(m - 1);
  auto wc = [&](int cell) { return 0.5 * (w[cell] + w[cell + 1]); };
  for (int i = 0; i < m; ++i) {
    const int node = i + 1;
    const double p = sigmoid(phi[node]);
    diag[i] = (wc(node - 1) + wc(node)) / h - p * (1.0 - p) * h;
    if (i + 1 < m) off[i] = -wc(node) / h;
  }

  double lo = diag[0] / h, hi = diag[0] / h;
  for (int i = 0; i < m; ++i) {
    double r = 0.0;
    if (i > 0) r += std::fabs(off[i - 1]);
    if (i < m - 1) r += std::fabs(off[i]);
    lo = std::min(lo, (diag[i] - r) / h);
    hi = std::max(hi, (diag[i] + r) / h);
  }
  if (scale_out) *scale_out = std::max(std::fabs(lo), std::fabs(hi));

  // smallest eigenvalue: bisect for the first mu with count >= 1
  for (int it = 0; it < 200 && hi - lo > 1e-14 * std::max(1.0, std::fabs(lo)); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (sturm_count(diag, off, h, mid) >= 1)
      hi = mid;
    else
      lo = mid;
  }
  return 0.5 * (lo + hi);
}

double second_variation_min_eig(const Profile& phi, double eps,
                                double* scale_out) {
  return second_variation_min_eig(phi, ddx(phi).v, eps, scale_out);
}

double hamiltonian_with_derivs(const Grid& g, const std::vector<double>& rho_v,
                               const std::vector<double>& rho_x,
                               const std::vector<double>& h_x, double eps) {
  Profile integrand(g);
  for (int i = 0; i < g.n; ++i) {
    const double s = mobility(rho_v[i]);
    integrand[i] =
        eps * s * h_x[i] * h_x[i] - (eps * rho_x[i] - s) * h_x[i];
  }
  return integrate(integrand);
}

double hamiltonian(const Profile& rho, const Profile& h, double eps) {
  if (rho.grid != h.grid)
    throw std::invalid_argument("hamiltonian: grid mismatch");
  if (std::fabs(h[0]) > 1e-9 || std::fabs(h[h.n() - 1]) > 1e-9)
    throw std::invalid_argument("hamiltonian: h must vanish at the ends");
  return hamiltonian_with_derivs(rho.grid, rho.v, ddx(rho).v, ddx(h).v, eps);
}

double hamiltonian_hat_with_derivs(const Grid& g,
                                   const std::vector<double>& rho_v,
                                   const std::vector<double>& w_x,
                                   const std::vector<double>& w_xx, double eps,
                                   const Params& P) {
  const int n = g.n;
  Profile integrand(g);
  for (int i = 0; i < n; ++i) {
    const double s = mobility(rho_v[i]);
    integrand[i] =
        -eps * s * w_x[i] * w_x[i] - eps * rho_v[i] * w_xx[i] + s * w_x[i];
  }
  return integrate(integrand) - P.rho1 * (1.0 - eps * w_x[n - 1]) +
         P.rho0 * (1.0 - eps * w_x[0]);
}

double hamiltonian_hat(const Profile& rho, const Profile& w, double eps,
                       const Params& P) {
  if (rho.grid != w.grid)
    throw std::invalid_argument("hamiltonian_hat: grid mismatch");
  if (std::fabs(w[0] - P.phi0) > 1e-9 ||
      std::fabs(w[w.n() - 1] - P.phi1) > 1e-9)
    throw std::invalid_argument(
        "hamiltonian_hat: w must be anchored at (phi0, phi1)");
  return hamiltonian_hat_with_derivs(rho.grid, rho.v, ddx(w).v, d2dx2(w).v,
                                     eps, P);
}

}  // namespace bqp
