#include "bqp/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "bqp/functionals.hpp"
#include "bqp/stationary.hpp"
#include "bqp/tridiag.hpp"

namespace bqp {

namespace {

// One semi-implicit step of u_t + f(u)_x = eps u_xx with Dirichlet ends;
// reusable workspace to keep the hot loops allocation-free.
struct BurgersStepper {
  double eps, dt, h, lo, hi;
  double left, right;  // Dirichlet values
  int n;
  std::vector<double> a, b, c, d;

  BurgersStepper(const Grid& g, double eps_, const Params& P, double dt_,
                 const Profile& u0)
      : eps(eps_), dt(dt_), h(g.h), n(g.n) {
    if (!(dt > 0.0)) throw std::invalid_argument("burgers: dt must be > 0");
    if (dt > g.h * (1.0 + 1e-12))
      throw std::invalid_argument("burgers: advective CFL requires dt <= h");
    left = P.rho0;
    right = P.rho1;
    lo = std::min(P.rho0, *std::min_element(u0.v.begin(), u0.v.end())) - 1e-10;
    hi = std::max(P.rho1, *std::max_element(u0.v.begin(), u0.v.end())) + 1e-10;
    const int m = n - 2;
    const double r = eps * dt / (h * h);
    a.assign(m, -r);
    b.assign(m, 1.0 + 2.0 * r);
    c.assign(m, -r);
    d.assign(m, 0.0);
  }

  void step(Profile& u) {
    const double r = eps * dt / (h * h);
    for (int i = 1; i < n - 1; ++i) {
      const double adv = (mobility(u[i + 1]) - mobility(u[i - 1])) / (2.0 * h);
      d[i - 1] = u[i] - dt * adv;
    }
    d[0] += r * left;
    d[n - 3] += r * right;
    const std::vector<double> sol = solve_tridiagonal(a, b, c, d);
    u[0] = left;
    u[n - 1] = right;
    for (int i = 1; i < n - 1; ++i) {
      const double v = sol[i - 1];
      if (v < lo || v > hi)
        throw std::runtime_error("burgers: maximum principle violated");
      u[i] = v;
    }
  }
};

Profile entropy_var(const Profile& F) {
  Profile psi(F.grid);
  for (int i = 0; i < F.n(); ++i) {
    if (F[i] <= 0.0 || F[i] >= 1.0)
      throw std::runtime_error("entropy variable undefined: density hit {0,1}");
    psi[i] = std::log(F[i] / (1.0 - F[i]));
  }
  return psi;
}

void check_slope_band(const Profile& psi, double eps, const char* who) {
  const Profile px = ddx(psi);
  for (int i = 0; i < psi.n(); ++i) {
    const double m = eps * px[i];
    if (m < -1e-9 || m > 1.0 + 1e-9)
      throw std::runtime_error(std::string(who) +
                               ": slope left the band [0, 1/eps]");
  }
}

// Second-order one-sided second derivatives for the end nodes.
double d2_left(const Profile& p, double h) {
  return (2.0 * p[0] - 5.0 * p[1] + 4.0 * p[2] - p[3]) / (h * h);
}
double d2_right(const Profile& p, double h) {
  const int n = p.n();
  return (2.0 * p[n - 1] - 5.0 * p[n - 2] + 4.0 * p[n - 3] - p[n - 4]) /
         (h * h);
}

double rate_of_slice(const Profile& u, const Profile& H, double eps) {
  const Profile hx = ddx(H);
  Profile integrand(u.grid);
  for (int i = 0; i < u.n(); ++i)
    integrand[i] = mobility(u[i]) * hx[i] * hx[i];
  return eps * integrate(integrand);
}

void fill_action_totals(ActionReport& rep, const TimePath& u,
                        double static_value) {
  const int m = rep.n_frames;
  double s = 0.0;
  for (int j = 0; j < m; ++j) {
    const double w = (j == 0 || j == m - 1) ? 0.5 : 1.0;
    s += w * rep.per_slice[j];
  }
  rep.action = s * u.dt;
  rep.t0 = u.t0;
  rep.t1 = u.t1;
  rep.dt = u.dt;
  if (std::isfinite(static_value)) {
    rep.static_value = static_value;
    rep.rel_gap = std::fabs(rep.action - static_value) /
                  std::max(1.0, std::fabs(static_value));
    rep.has_static = true;
  }
}

}  // namespace

TimePath burgers_solve(const Profile& rho_init, double eps, const Params& P,
                       double T, double dt) {
  if (!(T > 0.0)) throw std::invalid_argument("burgers_solve: T must be > 0");
  const int n_steps = std::max(1, static_cast<int>(std::llround(T / dt)));
  TimePath path;
  path.grid = rho_init.grid;
  path.t0 = 0.0;
  path.dt = dt;
  path.t1 = n_steps * dt;
  path.frames.reserve(n_steps + 1);
  path.frames.push_back(rho_init);

  BurgersStepper stepper(rho_init.grid, eps, P, dt, rho_init);
  Profile u = rho_init;
  for (int s = 0; s < n_steps; ++s) {
    stepper.step(u);
    path.frames.push_back(u);
  }
  return path;
}

RelaxResult burgers_relax(const Profile& rho_init, double eps, const Params& P,
                          double dt, double tol, double t_cap) {
  RelaxResult out;
  const StationaryResult st = stationary_profile(P, eps, rho_init.grid);
  out.rho_bar = st.rho_bar;
  out.current = st.current;

  TimePath& path = out.path;
  path.grid = rho_init.grid;
  path.t0 = 0.0;
  path.dt = dt;
  path.frames.push_back(rho_init);

  BurgersStepper stepper(rho_init.grid, eps, P, dt, rho_init);
  Profile u = rho_init;
  Profile prev = u;
  double dist = sup_dist(u, out.rho_bar);
  int s = 0;
  while (true) {
    if (dist <= tol && s >= 3) {
      out.converged = true;
      break;
    }
    if (s * dt >= t_cap) break;
    prev = u;
    stepper.step(u);
    ++s;
    path.frames.push_back(u);
    dist = sup_dist(u, out.rho_bar);
    // stalled at the discrete equilibrium: velocity far below tol per unit time
    if (s >= 3 && sup_dist(u, prev) / dt <= std::max(1e-10, 1e-3 * tol)) break;
  }
  out.t_relax = s * dt;
  out.final_dist = dist;
  path.frames.push_back(out.rho_bar);  // exact target appended
  path.t1 = (path.n_frames() - 1) * dt;
  return out;
}

TimePath psi_path(const Profile& phi, double eps, const Params& P, double T,
                  double dt) {
  check_slope_band(phi, eps, "psi_path seed");
  Profile F0(phi.grid);
  for (int i = 0; i < phi.n(); ++i) F0[i] = sigmoid(phi[i]);
  TimePath fpath = burgers_solve(F0, eps, P, T, dt);
  TimePath psi = fpath;
  for (int j = 0; j < psi.n_frames(); ++j) {
    psi.frames[j] = entropy_var(fpath.frames[j]);
    check_slope_band(psi.frames[j], eps, "psi_path frame");
  }
  return psi;
}

std::pair<double, double> psi_terminal_distance(const TimePath& psi,
                                                double eps, const Params& P) {
  const StationaryResult st = stationary_profile(P, eps, psi.grid);
  Profile target(psi.grid);
  for (int i = 0; i < target.n(); ++i)
    target[i] = entropy_prime(std::min(1.0 - 1e-15, std::max(1e-15, st.rho_bar[i])));
  const Profile& last = psi.frames.back();
  const double value_dist = sup_dist(last, target);
  const Profile da = ddx(last);
  const Profile db = ddx(target);
  double slope_dist = 0.0;
  for (int i = 0; i < last.n(); ++i)
    slope_dist = std::max(slope_dist, std::fabs(da[i] - db[i]));
  return {value_dist, slope_dist};
}

ExcursionResult excursion_path(const Profile& rho, const FixedPointResult& fp,
                               double eps, const Params& P,
                               const ExcursionOptions& opt) {
  if (rho.grid != fp.phi.grid)
    throw std::invalid_argument("excursion_path: grid mismatch");
  if (fp.el_residual > opt.el_tol)
    throw std::invalid_argument(
        "excursion_path: fixed point's critical-equation defect too large; "
        "the reconstructed terminal frame would not match rho");
  const Grid& g = rho.grid;
  const int n = g.n;
  const double h = g.h;
  const double dt = opt.dt > 0.0 ? opt.dt : h;

  ExcursionResult out;
  const StationaryResult st = stationary_profile(P, eps, g);
  out.rho_bar = st.rho_bar;

  Profile F(g);
  for (int i = 0; i < n; ++i) F[i] = sigmoid(fp.phi[i]);

  // forward relaxation, converting each frame to (v, H) on the fly
  std::vector<Profile> u_frames, c_frames;
  BurgersStepper stepper(g, eps, P, dt, F);

  auto convert = [&](const Profile& frame, bool terminal) {
    const Profile psi = entropy_var(frame);
    const Profile px = ddx(psi);
    Profile pxx = d2dx2(psi);
    pxx[0] = d2_left(psi, h);
    pxx[n - 1] = d2_right(psi, h);

    Profile v(g);
    for (int i = 0; i < n; ++i) {
      const double den = px[i] * (1.0 - eps * px[i]);
      if (den < opt.slope_guard)
        throw std::runtime_error(
            "excursion_path: entropy-variable slope degenerate; frame rejected");
      v[i] = (1.0 - frame[i]) - eps * pxx[i] / den;
    }
    if (terminal) {
      out.u0_recon_defect = sup_dist(v, rho);
      u_frames.push_back(rho);  // exact target replaces the reconstruction
    } else {
      out.boundary_defect = std::max(
          out.boundary_defect,
          std::max(std::fabs(v[0] - P.rho0), std::fabs(v[n - 1] - P.rho1)));
      v[0] = P.rho0;
      v[n - 1] = P.rho1;
      for (int i = 0; i < n; ++i) {
        if (v[i] < -1e-10 || v[i] > 1.0 + 1e-10)
          throw std::runtime_error(
              "excursion_path: reconstructed density left [0,1]");
        v[i] = std::min(1.0, std::max(0.0, v[i]));
      }
      u_frames.push_back(v);
    }
    const Profile& uf = u_frames.back();
    Profile H(g);
    for (int i = 0; i < n; ++i) {
      if (uf[i] < 1e-12 || uf[i] > 1.0 - 1e-12)
        throw std::runtime_error(
            "excursion_path: control undefined, density at {0,1}");
      H[i] = std::log(uf[i] / (1.0 - uf[i])) - psi[i];
    }
    c_frames.push_back(H);
  };

  convert(F, /*terminal=*/true);
  Profile prev = F;
  double dist = sup_dist(F, out.rho_bar);
  int s = 0;
  while (true) {
    if (dist <= opt.relax_tol && s >= 3) {
      out.relax_converged = true;
      break;
    }
    if (s * dt >= opt.t_cap) break;
    prev = F;
    stepper.step(F);
    ++s;
    convert(F, /*terminal=*/false);
    dist = sup_dist(F, out.rho_bar);
    if (s >= 3 &&
        sup_dist(F, prev) / dt <= std::max(1e-10, 1e-3 * opt.relax_tol))
      break;
  }
  out.relax_final_dist = dist;

  // exact stationary start: zero control by construction
  u_frames.push_back(out.rho_bar);
  c_frames.push_back(Profile(g, 0.0));

  std::reverse(u_frames.begin(), u_frames.end());
  std::reverse(c_frames.begin(), c_frames.end());

  const int m = static_cast<int>(u_frames.size());
  out.t_horizon = (m - 1) * dt;
  out.u.grid = g;
  out.u.t0 = -out.t_horizon;
  out.u.t1 = 0.0;
  out.u.dt = dt;
  out.u.frames = std::move(u_frames);
  out.control.grid = g;
  out.control.t0 = -out.t_horizon;
  out.control.t1 = 0.0;
  out.control.dt = dt;
  out.control.frames = std::move(c_frames);
  return out;
}

ActionReport action_of_controlled_path(const TimePath& u,
                                       const TimePath& control, double eps,
                                       double static_value) {
  const int m = u.n_frames();
  if (control.n_frames() != m || m < 2)
    throw std::invalid_argument("action: path and control must share frames");
  if (u.grid != control.grid || std::fabs(u.dt - control.dt) > 1e-15)
    throw std::invalid_argument("action: path and control must share the mesh");

  ActionReport rep;
  rep.n_frames = m;
  rep.per_slice.resize(m);
  const int last = m - 1;
  for (int j = 0; j < m; ++j) {
    const Profile& H = control.frames[j];
    if (j != last) {  // terminal control may carry boundary values when
                      // rho's ends differ from (rho0, rho1)
      if (std::fabs(H[0]) > 1e-7 || std::fabs(H[H.n() - 1]) > 1e-7)
        throw std::invalid_argument(
            "action: control frame does not vanish at the ends");
    }
    rep.per_slice[j] = rate_of_slice(u.frames[j], H, eps);
  }
  fill_action_totals(rep, u, static_value);
  return rep;
}

ActionReport action_via_elliptic(const TimePath& u, double eps,
                                 const Params& P, double static_value,
                                 double sigma_min) {
  (void)P;
  const int m = u.n_frames();
  if (m < 3)
    throw std::invalid_argument("action_via_elliptic: need at least 3 frames");
  const Grid& g = u.grid;
  const int n = g.n;
  const double h = g.h;
  const double dt = u.dt;

  ActionReport rep;
  rep.n_frames = m;
  rep.per_slice.resize(m);

  const int mi = n - 2;
  std::vector<double> a(mi), b(mi), c(mi), d(mi);
  for (int j = 0; j < m; ++j) {
    const Profile& uj = u.frames[j];
    for (int i = 0; i < n; ++i)
      if (mobility(uj[i]) < sigma_min)
        throw std::runtime_error(
            "action_via_elliptic: degenerate mobility at a node");

    for (int i = 1; i < n - 1; ++i) {
      double ut;
      if (j == 0)
        ut = (-3.0 * u.frames[0][i] + 4.0 * u.frames[1][i] -
              u.frames[2][i]) /
             (2.0 * dt);
      else if (j == m - 1)
        ut = (3.0 * u.frames[j][i] - 4.0 * u.frames[j - 1][i] +
              u.frames[j - 2][i]) /
             (2.0 * dt);
      else
        ut = (u.frames[j + 1][i] - u.frames[j - 1][i]) / (2.0 * dt);
      const double flux =
          (mobility(uj[i + 1]) - mobility(uj[i - 1])) / (2.0 * h);
      const double diff = (uj[i + 1] - 2.0 * uj[i] + uj[i - 1]) / (h * h);
      const double r = ut + flux - eps * diff;

      const double sl = mobility(0.5 * (uj[i] + uj[i - 1]));
      const double sr = mobility(0.5 * (uj[i] + uj[i + 1]));
      a[i - 1] = -2.0 * eps * sl / (h * h);
      c[i - 1] = -2.0 * eps * sr / (h * h);
      b[i - 1] = 2.0 * eps * (sl + sr) / (h * h);
      d[i - 1] = r;
    }
    const std::vector<double> sol = solve_tridiagonal(a, b, c, d);
    Profile H(g, 0.0);
    for (int i = 1; i < n - 1; ++i) H[i] = sol[i - 1];
    rep.per_slice[j] = rate_of_slice(uj, H, eps);
  }
  fill_action_totals(rep, u, static_value);
  return rep;
}

StaticDynamicReport verify_static_dynamic(const Profile& rho, double eps,
                                          const Params& P,
                                          const ExcursionOptions& opt,
                                          const EnumerateOptions& eopt) {
  StaticDynamicReport rep;
  const MinimizationReport mr = quasi_potential(rho, eps, P, eopt);
  rep.s_naught = mr.s_naught;
  rep.s_naught_stationary = mr.s_naught_stationary;
  rep.s_eps = mr.s_eps;

  for (const FixedPointResult& fp : mr.fixed_points) {
    if (fp.kind != "minimizer") continue;
    const ExcursionResult ex = excursion_path(rho, fp, eps, P, opt);
    const double stat = fp.g_value - mr.s_naught_stationary;
    const ActionReport a1 =
        action_of_controlled_path(ex.u, ex.control, eps, stat);
    const ActionReport a2 = action_via_elliptic(ex.u, eps, P, stat);

    StaticDynamicRow row;
    row.g_value = fp.g_value;
    row.static_value = stat;
    row.action_control = a1.action;
    row.action_elliptic = a2.action;
    row.rel_gap_control = a1.rel_gap;
    row.rel_gap_routes =
        std::fabs(a1.action - a2.action) /
        std::max({std::fabs(a1.action), std::fabs(a2.action), 1e-12});
    row.u0_recon_defect = ex.u0_recon_defect;
    row.kind = fp.kind;
    rep.rows.push_back(row);
    rep.max_rel_gap =
        std::max({rep.max_rel_gap, row.rel_gap_control, row.rel_gap_routes});
  }
  if (rep.rows.empty())
    throw std::runtime_error("verify_static_dynamic: no minimizer found");
  return rep;
}

}  // namespace bqp
