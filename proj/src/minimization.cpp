#include "bqp/minimization.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "bqp/functionals.hpp"
#include "bqp/tridiag.hpp"

namespace bqp {

namespace {

constexpr double kPi = 3.14159265358979323846;

constexpr double kLogACap = 760.0;  // beyond this the slope saturates at 1/eps

double logit(double m) { return std::log(m / (1.0 - m)); }

}  // namespace

KResult apply_k(const Profile& rho, const Profile& phi, double eps,
                const Params& P, double a_tol) {
  if (rho.grid != phi.grid) throw std::invalid_argument("apply_k: grid mismatch");
  if (!(eps > 0.0)) throw std::invalid_argument("apply_k: eps must be > 0");
  const Grid& g = rho.grid;
  const int n = g.n;

  // log E(y) = (1/eps) * integral_0^y [(1+e^phi)^-1 - rho]
  std::vector<double> inner(n);
  for (int i = 0; i < n; ++i) inner[i] = (1.0 - sigmoid(phi[i])) - rho[i];
  std::vector<double> logE = cum_integrate(g, inner);
  for (double& v : logE) v /= eps;

  // (K phi)(1) - phi1 as a function of log A; strictly increasing
  auto defect = [&](double logA) {
    double s = 0.5 * (sigmoid(logA + logE[0]) + sigmoid(logA + logE[n - 1]));
    for (int i = 1; i < n - 1; ++i) s += sigmoid(logA + logE[i]);
    return P.phi0 + s * g.h / eps - P.phi1;
  };

  const double m_needed = eps * (P.phi1 - P.phi0);  // required mean slope
  double L = 0.0;
  for (double v : logE) L = std::max(L, std::fabs(v));
  double lo, hi;
  if (m_needed < 1.0) {
    lo = logit(m_needed) - L - 2.0;
    hi = logit(m_needed) + L + 2.0;
  } else {
    lo = -L - 2.0;
    hi = 60.0;
  }

  int guard = 0;
  while (defect(lo) >= 0.0 && ++guard < 100) lo -= 20.0;
  bool capped = false;
  while (defect(hi) < 0.0) {
    hi += 20.0;
    if (hi > kLogACap) {
      // target reachable only asymptotically (eps at or above eps0)
      if (defect(kLogACap) < -a_tol)
        throw std::runtime_error(
            "apply_k: boundary value unreachable; eps*(phi1-phi0) >= 1");
      capped = true;
      hi = kLogACap;
      break;
    }
  }

  double logA;
  if (capped) {
    // smallest log A whose defect is within tolerance
    double plo = lo, phi_hi = hi;
    for (int it = 0; it < 200 && phi_hi - plo > 1e-13; ++it) {
      const double mid = 0.5 * (plo + phi_hi);
      if (defect(mid) >= -0.9 * a_tol)
        phi_hi = mid;
      else
        plo = mid;
    }
    logA = phi_hi;
  } else {
    for (int it = 0; it < 250 && hi - lo > 1e-13; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (defect(mid) < 0.0)
        lo = mid;
      else
        hi = mid;
    }
    logA = 0.5 * (lo + hi);
  }
  if (std::fabs(defect(logA)) > std::max(a_tol, 1e-11))
    throw std::runtime_error("apply_k: normalization solve missed tolerance");

  KResult out;
  out.log_a = logA;
  out.a_const = std::exp(std::min(logA, 700.0));
  out.phi_x.resize(n);
  for (int i = 0; i < n; ++i) out.phi_x[i] = sigmoid(logA + logE[i]) / eps;
  std::vector<double> cum = cum_integrate(g, out.phi_x);
  out.phi = Profile(g);
  for (int i = 0; i < n; ++i) out.phi[i] = P.phi0 + cum[i];
  return out;
}

double solve_a(const Profile& rho, const Profile& phi, double eps,
               const Params& P, double tol) {
  return apply_k(rho, phi, eps, P, tol).a_const;
}

double el_residual_sup(const Profile& rho, const Profile& phi, double eps) {
  const Profile px = ddx(phi);
  const Profile pxx = d2dx2(phi);
  double sup = 0.0;
  for (int i = 1; i < phi.n() - 1; ++i) {
    const double inv = 1.0 - sigmoid(phi[i]);  // (1+e^phi)^-1
    const double R = eps * pxx[i] -
                     px[i] * (1.0 - eps * px[i]) * (inv - rho[i]);
    sup = std::max(sup, std::fabs(R));
  }
  return sup;
}

namespace {

void finalize_fixed_point(FixedPointResult& out, const Profile& rho,
                          const Profile& terminal, double eps, const Params& P,
                          double a_tol) {
  const KResult kf = apply_k(rho, terminal, eps, P, a_tol);
  out.k_residual = sup_dist(kf.phi, terminal);
  out.phi = kf.phi;
  out.phi_x = kf.phi_x;
  out.a_const = kf.a_const;
  out.log_a = kf.log_a;
  out.el_residual = el_residual_sup(rho, out.phi, eps);
  out.g_value = g_eps(rho, out.phi, eps);
  out.delta_observed = 1.0;
  for (double s : out.phi_x)
    out.delta_observed =
        std::min(out.delta_observed, std::min(eps * s, 1.0 - eps * s));
  double scale = 1.0;
  out.min_eig = second_variation_min_eig(out.phi, out.phi_x, eps, &scale);
  out.eig_scale = scale;
  const double tol = 1e-8 * scale;
  out.kind = out.min_eig > tol ? "minimizer"
             : out.min_eig < -tol ? "saddle"
                                  : "undetermined";
}

// The fixed-point map reads only the seed's values (never its slope) and its
// output slope is always inside the band, so picard seeds need anchoring only.
void check_anchors(const Profile& seed, const Params& P) {
  const int n = seed.n();
  if (std::fabs(seed[0] - P.phi0) > 1e-9 ||
      std::fabs(seed[n - 1] - P.phi1) > 1e-9)
    throw std::invalid_argument("seed not anchored at (phi0, phi1)");
}

// Flow seeds must additionally start inside the functional's domain.
void check_seed(const Profile& seed, double eps, const Params& P) {
  check_anchors(seed, P);
  const int n = seed.n();
  const Profile sx = ddx(seed);
  for (int i = 0; i < n; ++i) {
    const double m = eps * sx[i];
    if (m < -1e-9 || m > 1.0 + 1e-9)
      throw std::invalid_argument("seed slope leaves [0, 1/eps]");
  }
}

}  // namespace

FixedPointResult picard(const Profile& rho, const Profile& phi_seed, double eps,
                        const Params& P, const PicardOptions& opt) {
  check_anchors(phi_seed, P);
  Profile phi = phi_seed;
  FixedPointResult out;
  for (int it = 0; it < opt.max_iter; ++it) {
    const KResult k = apply_k(rho, phi, eps, P, opt.a_tol);
    const double res = sup_dist(k.phi, phi);
    if (res <= opt.tol) {
      out.converged = true;
      out.iterations = it + 1;
      phi = k.phi;
      break;
    }
    for (int i = 0; i < phi.n(); ++i)
      phi[i] = (1.0 - opt.theta) * phi[i] + opt.theta * k.phi[i];
  }
  if (!out.converged) out.iterations = opt.max_iter;
  finalize_fixed_point(out, rho, phi, eps, P, opt.a_tol);
  if (out.converged && out.k_residual > 10.0 * opt.tol) out.converged = false;
  return out;
}

namespace {

// Shared driver for the two integrated-form maps.  build_slope(phi, phi_x_fd)
// returns the analytic slope field of the next iterate.
template <typename SlopeFn>
ContractionResult contraction_iterate(const Profile& rho,
                                      const Profile& phi_seed, double eps,
                                      const Params& P,
                                      const PicardOptions& opt,
                                      SlopeFn build_slope) {
  check_seed(phi_seed, eps, P);
  const Grid& g = rho.grid;
  const int n = g.n;
  ContractionResult out;

  Profile phi = phi_seed;
  std::vector<double> slope_prev = ddx(phi).v;
  double d_prev = -1.0;
  bool have_metric_prev = false;

  for (int it = 0; it < opt.max_iter; ++it) {
    std::vector<double> slope = build_slope(phi, slope_prev);

    // keep the iterate inside the admissible slope band
    bool clipped = false;
    for (double& s : slope) {
      if (s < 0.0) {
        s = 0.0;
        clipped = true;
      } else if (eps * s > 1.0) {
        s = (1.0 - 1e-12) / eps;
        clipped = true;
      }
    }
    std::vector<double> cum = cum_integrate(g, slope);
    Profile next(g);
    if (clipped) {
      out.projected = true;
      const double total = cum[n - 1];
      if (total <= 0.0)
        throw std::runtime_error("contraction map: degenerate projected iterate");
      const double mass = P.phi1 - P.phi0;
      for (int i = 0; i < n; ++i) next[i] = P.phi0 + cum[i] * mass / total;
      for (int i = 0; i < n; ++i) slope[i] *= mass / total;
    } else {
      for (int i = 0; i < n; ++i) next[i] = P.phi0 + cum[i];
    }

    double d = 0.0;
    for (int i = 0; i < n; ++i)
      d = std::max(d, std::fabs(slope[i] - slope_prev[i]));
    if (have_metric_prev && d_prev > 0.0) out.contraction_factor = d / d_prev;
    d_prev = d;
    have_metric_prev = true;

    const double step = sup_dist(next, phi);
    phi = next;
    slope_prev = slope;
    if (d <= opt.tol && step <= opt.tol) {
      out.fp.converged = true;
      out.fp.iterations = it + 1;
      break;
    }
  }
  if (!out.fp.converged) out.fp.iterations = opt.max_iter;
  const bool was_converged = out.fp.converged;
  finalize_fixed_point(out.fp, rho, phi, eps, P, opt.a_tol);
  out.fp.converged = was_converged;
  return out;
}

}  // namespace

ContractionResult contraction_k1(const Profile& rho, const Profile& phi_seed,
                                 double eps, const Params& P,
                                 const PicardOptions& opt) {
  const Grid& g = rho.grid;
  const int n = g.n;
  return contraction_iterate(
      rho, phi_seed, eps, P, opt,
      [&](const Profile& phi, const std::vector<double>& phi_x) {
        // slope(x) = 1/eps - (1/eps - 1/eps0) E(x)/int_0^1 E,
        // E = exp of the cumulative of (rho - (1+e^phi)^-1) phi_x
        std::vector<double> r(n);
        for (int i = 0; i < n; ++i)
          r[i] = (rho[i] - (1.0 - sigmoid(phi[i]))) * phi_x[i];
        std::vector<double> logE = cum_integrate(g, r);
        double M = logE[0];
        for (double v : logE) M = std::max(M, v);
        std::vector<double> E(n);
        for (int i = 0; i < n; ++i) E[i] = std::exp(logE[i] - M);
        Profile Ep(g, E);
        const double tot = integrate(Ep);
        const double c = (1.0 / eps - 1.0 / P.eps0) / tot;
        std::vector<double> slope(n);
        for (int i = 0; i < n; ++i) slope[i] = 1.0 / eps - c * E[i];
        return slope;
      });
}

ContractionResult contraction_k2(const Profile& rho, const Profile& phi_seed,
                                 double eps, const Params& P,
                                 const PicardOptions& opt) {
  const Grid& g = rho.grid;
  const int n = g.n;
  return contraction_iterate(
      rho, phi_seed, eps, P, opt,
      [&](const Profile& phi, const std::vector<double>& phi_x) {
        // slope(x) = (phi1-phi0) E(x)/int_0^1 E,
        // E = exp of the cumulative of ((1+e^phi)^-1 - rho)(1 - eps phi_x)/eps
        std::vector<double> r(n);
        for (int i = 0; i < n; ++i)
          r[i] = ((1.0 - sigmoid(phi[i])) - rho[i]) *
                 (1.0 - eps * phi_x[i]) / eps;
        std::vector<double> logE = cum_integrate(g, r);
        double M = logE[0];
        for (double v : logE) M = std::max(M, v);
        std::vector<double> E(n);
        for (int i = 0; i < n; ++i) E[i] = std::exp(logE[i] - M);
        Profile Ep(g, E);
        const double tot = integrate(Ep);
        const double c = (P.phi1 - P.phi0) / tot;
        std::vector<double> slope(n);
        for (int i = 0; i < n; ++i) slope[i] = c * E[i];
        return slope;
      });
}

FlowResult gradient_flow(const Profile& rho, const Profile& v_seed, double eps,
                         const Params& P, const FlowOptions& opt) {
  if (rho.grid != v_seed.grid)
    throw std::invalid_argument("gradient_flow: grid mismatch");
  check_seed(v_seed, eps, P);
  const Grid& g = rho.grid;
  const int n = g.n;
  const double h = g.h;

  Profile v = v_seed;
  const double dt0 = opt.dt0 > 0.0 ? opt.dt0 : 0.5 * h;
  double dt = dt0;
  double G = g_eps(rho, v, eps);
  if (!std::isfinite(G))
    throw std::invalid_argument("gradient_flow: seed outside the functional domain");

  FlowResult out;
  double t = 0.0;
  double diss = 0.0;

  auto defect_and_dissipation = [&](const Profile& w, double& resid_sup) {
    const Profile wx = ddx(w);
    const Profile wxx = d2dx2(w);
    resid_sup = 0.0;
    Profile dint(g);
    for (int i = 1; i < n - 1; ++i) {
      const double den = wx[i] * (1.0 - eps * wx[i]);
      const double R =
          eps * wxx[i] + den * (rho[i] - sigmoid(-w[i]));
      resid_sup = std::max(resid_sup, std::fabs(R));
      dint[i] = R * R / std::max(den, 1e-14);
    }
    return integrate(dint);
  };

  int rejects = 0;
  while (out.steps < opt.max_steps && t < opt.t_max) {
    double resid = 0.0;
    diss = defect_and_dissipation(v, resid);
    if (resid <= opt.resid_tol || diss <= opt.diss_tol) {
      out.converged = true;
      break;
    }

    // one semi-implicit step: explicit reaction, implicit diffusion
    const Profile vx = ddx(v);
    Profile v_new = v;
    const double r = eps * dt / (h * h);
    const int m = n - 2;
    std::vector<double> A(m, -r), B(m, 1.0 + 2.0 * r), C(m, -r), D(m);
    for (int k = 0; k < m; ++k) {
      const int i = k + 1;
      const double react =
          vx[i] * (1.0 - eps * vx[i]) * (rho[i] - sigmoid(-v[i]));
      D[k] = v[i] + dt * react;
    }
    D[0] += r * P.phi0;
    D[m - 1] += r * P.phi1;
    const std::vector<double> sol = solve_tridiagonal(A, B, C, D);
    for (int k = 0; k < m; ++k) v_new[k + 1] = sol[k];

    const double G_new = g_eps(rho, v_new, eps);
    if (std::isfinite(G_new) && G_new <= G + opt.lyapunov_slack) {
      out.max_step_increase = std::max(out.max_step_increase, G_new - G);
      v = v_new;
      G = G_new;
      t += dt;
      ++out.steps;
      rejects = 0;
      dt = std::min(dt * 1.25, dt0);
    } else {
      dt *= 0.5;
      if (++rejects > opt.max_rejects) break;  // stuck
    }
  }
  out.dissipation_final = diss;

  const bool conv = out.converged;
  finalize_fixed_point(out.fp, rho, v, eps, P, 1e-12);
  out.fp.converged = conv;
  out.fp.iterations = out.steps;
  return out;
}

namespace {

// Blend toward the affine profile just enough that the discrete slope (the
// same ddx the functional uses, one-sided at the ends) stays inside the
// domain band.  ddx is linear in the profile, so one blend is exact.
void blend_into_band(Profile& out, const Params& P, double eps) {
  const Grid& g = out.grid;
  const double mass = P.phi1 - P.phi0;
  const Profile sx = ddx(out);
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (double s : sx.v) {
    lo = std::min(lo, s);
    hi = std::max(hi, s);
  }
  const double floor_s = 1e-4 * mass;
  const double cap_s = 0.98 / eps;
  double beta = 0.0;
  if (lo < floor_s) beta = std::max(beta, (floor_s - lo) / (mass - lo));
  if (hi > cap_s && mass < cap_s)
    beta = std::max(beta, (hi - cap_s) / (hi - mass));
  if (beta > 0.0) {
    beta = std::min(1.0, beta);
    for (int i = 0; i < g.n; ++i) {
      const double aff = P.phi0 + mass * g.x(i);
      out[i] = (1.0 - beta) * out[i] + beta * aff;
    }
  }
}

}  // namespace

Profile smoothed_step(const Grid& g, const Params& P, double y, double eps) {
  const double mass = P.phi1 - P.phi0;
  // kernel wide enough that eps * peak slope stays below 1
  const double w = std::max({2.0 * eps, 1.25 * eps * mass, 2.0 * g.h});
  const int n = g.n;
  std::vector<double> k(n, 0.0);
  for (int i = 0; i < n; ++i) {
    const double t = g.x(i) - y;
    if (std::fabs(t) < w) {
      const double c = std::cos(0.5 * kPi * t / w);
      k[i] = c * c;
    }
  }
  const double norm = integrate(Profile(g, k));
  if (norm <= 0.0) throw std::runtime_error("smoothed_step: empty kernel");
  std::vector<double> slope(n);
  for (int i = 0; i < n; ++i) slope[i] = mass * k[i] / norm;

  std::vector<double> cum = cum_integrate(g, slope);
  Profile out(g);
  const double total = cum[n - 1];
  for (int i = 0; i < n; ++i) out[i] = P.phi0 + cum[i] * mass / total;
  // boundary truncation of the kernel can push the discrete slope over the
  // cap or slightly negative at the one-sided ends
  blend_into_band(out, P, eps);
  return out;
}

std::vector<Profile> build_seed_bank(const Profile& rho, double eps,
                                     const Params& P,
                                     const SeedBankOptions& opt) {
  const Grid& g = rho.grid;
  const int n = g.n;
  std::vector<Profile> bank;

  if (opt.include_affine) {
    Profile aff(g);
    for (int i = 0; i < n; ++i)
      aff[i] = P.phi0 + (P.phi1 - P.phi0) * g.x(i);
    bank.push_back(aff);
  }

  if (opt.include_stationary) {
    const StationaryResult st = stationary_profile(P, eps, g);
    Profile s(g);
    for (int i = 0; i < n; ++i)
      s[i] = entropy_prime(std::min(1.0 - 1e-12, std::max(1e-12, st.rho_bar[i])));
    s[0] = P.phi0;
    s[n - 1] = P.phi1;
    bank.push_back(s);
  }

  for (int j = 1; j <= opt.n_steps; ++j) {
    const double y = static_cast<double>(j) / (opt.n_steps + 1);
    bank.push_back(smoothed_step(g, P, y, eps));
  }

  if (opt.include_entropy_seed) {
    // monotone envelope of s'(rho), rescaled to the anchors and mollified
    std::vector<double> env(n);
    for (int i = 0; i < n; ++i) {
      const double c = std::min(1.0 - 1e-3, std::max(1e-3, rho[i]));
      env[i] = std::log(c / (1.0 - c));
      if (i > 0) env[i] = std::max(env[i], env[i - 1]);
    }
    const double span = env[n - 1] - env[0];
    if (span > 1e-9) {
      Profile raw(g);
      for (int i = 0; i < n; ++i)
        raw[i] = P.phi0 + (P.phi1 - P.phi0) * (env[i] - env[0]) / span;
      // mollify the derivative against the step kernel's width
      const double w = std::max(2.0 * eps, 2.0 * g.h);
      const int half = std::max(1, static_cast<int>(std::floor(w / g.h)));
      std::vector<double> rs = ddx(raw).v;
      std::vector<double> sm(n, 0.0), wt(n, 0.0);
      for (int i = 0; i < n; ++i)
        for (int j = -half; j <= half; ++j) {
          const int q = i + j;
          if (q < 0 || q >= n) continue;
          const double c = std::cos(0.5 * kPi * j / (half + 0.5));
          sm[i] += c * c * std::max(0.0, rs[q]);
          wt[i] += c * c;
        }
      for (int i = 0; i < n; ++i) sm[i] /= wt[i];
      std::vector<double> cum = cum_integrate(g, sm);
      if (cum[n - 1] > 1e-12) {
        Profile seed(g);
        for (int i = 0; i < n; ++i)
          seed[i] =
              P.phi0 + cum[i] * (P.phi1 - P.phi0) / cum[n - 1];
        blend_into_band(seed, P, eps);
        bank.push_back(seed);
      }
    }
  }
  return bank;
}

std::vector<FixedPointResult> enumerate_fixed_points(
    const Profile& rho, double eps, const Params& P,
    const EnumerateOptions& opt) {
  const std::vector<Profile> bank = build_seed_bank(rho, eps, P, opt.seeds);
  std::vector<FixedPointResult> found;

  for (const Profile& seed : bank) {
    FixedPointResult r = picard(rho, seed, eps, P, opt.picard);
    if (!r.converged) {
      FlowResult fl = gradient_flow(rho, seed, eps, P, opt.flow);
      if (!fl.converged) continue;
      PicardOptions polish = opt.picard;
      polish.max_iter = 300;
      FixedPointResult r2 = picard(rho, fl.fp.phi, eps, P, polish);
      r = r2.converged ? r2 : fl.fp;
      if (!r.converged) continue;
    }
    found.push_back(std::move(r));
  }
  if (found.empty())
    throw std::runtime_error("enumerate_fixed_points: no seed converged");

  std::sort(found.begin(), found.end(),
            [](const FixedPointResult& a, const FixedPointResult& b) {
              return a.g_value < b.g_value;
            });
  std::vector<FixedPointResult> out;
  for (FixedPointResult& r : found) {
    bool dup = false;
    for (FixedPointResult& kept : out)
      if (sup_dist(r.phi, kept.phi) < opt.dedup_tol) {
        dup = true;
        if (r.el_residual < kept.el_residual) {
          const double gmin = std::min(kept.g_value, r.g_value);
          kept = std::move(r);
          kept.g_value = gmin;  // keep the sorted ordering stable
        }
        break;
      }
    if (!dup) out.push_back(std::move(r));
  }
  return out;
}

MinimizationReport quasi_potential(const Profile& rho, double eps,
                                   const Params& P,
                                   const EnumerateOptions& opt) {
  MinimizationReport rep;
  rep.fixed_points = enumerate_fixed_points(rho, eps, P, opt);
  rep.s_naught = rep.fixed_points.front().g_value;

  const StationaryResult st = stationary_profile(P, eps, rho.grid);
  rep.rho_bar = st.rho_bar;
  const std::vector<FixedPointResult> fps_bar =
      enumerate_fixed_points(rep.rho_bar, eps, P, opt);
  rep.s_naught_stationary = fps_bar.front().g_value;

  rep.s_eps = rep.s_naught - rep.s_naught_stationary;
  if (rep.s_eps < -1e-8)
    throw std::runtime_error("quasi_potential: negative value (tolerance 1e-8)");
  for (const FixedPointResult& f : rep.fixed_points)
    if (f.kind == "minimizer") ++rep.n_minimizers;
  return rep;
}

}  // namespace bqp
