#include "bqp/inviscid.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "bqp/functionals.hpp"
#include "bqp/stationary.hpp"

namespace bqp {

namespace {

constexpr double kPi = 3.14159265358979323846;

int snap_node(const Grid& g, double y, const char* who) {
  const int i = static_cast<int>(std::llround(y / g.h));
  if (i < 0 || i >= g.n)
    throw std::invalid_argument(std::string(who) + ": location outside [0,1]");
  return i;
}

// Golden-section minimum of f on [a,b] to absolute y-tolerance.
double golden_min(const std::function<double(double)>& f, double a, double b,
                  double* val_out) {
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - gr * (b - a), d = a + gr * (b - a);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < 200 && (b - a) > 1e-12; ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - gr * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + gr * (b - a);
      fd = f(d);
    }
  }
  const double y = 0.5 * (a + b);
  if (val_out) *val_out = f(y);
  return y;
}

void run_parallel(int n_items, int jobs, const std::function<void(int)>& work) {
  jobs = std::max(1, std::min(jobs, n_items));
  if (jobs == 1) {
    for (int i = 0; i < n_items; ++i) work(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr first_error;
  std::mutex err_mutex;
  auto body = [&]() {
    while (true) {
      const int i = next.fetch_add(1);
      if (i >= n_items) return;
      try {
        work(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(jobs);
  for (int t = 0; t < jobs; ++t) pool.emplace_back(body);
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace

Thresholds thresholds(const Params& P) {
  if (!(P.phi0 < P.phi1))
    throw std::invalid_argument("thresholds: need phi0 < phi1");
  Thresholds t;
  t.phibar = P.phibar();
  t.a = 1.0 - (softplus(P.phi1) - softplus(P.phi0)) / (P.phi1 - P.phi0);
  t.a_plus = 1.0 - (softplus(t.phibar) - softplus(P.phi0)) / (t.phibar - P.phi0);
  t.a_minus = 1.0 - (softplus(P.phi1) - softplus(t.phibar)) / (P.phi1 - t.phibar);
  return t;
}

Profile step_phi(const Grid& g, const Params& P, double y) {
  Profile phi(g);
  for (int i = 0; i < g.n; ++i) phi[i] = g.x(i) < y ? P.phi0 : P.phi1;
  return phi;
}

InviscidMin minimize_inviscid(const Profile& rho, const Params& P,
                              int mesh_per_node, double val_tol,
                              double flat_tol) {
  const int m = std::max(16, mesh_per_node * rho.n());
  std::vector<double> ys(m + 1), vals(m + 1);
  for (int k = 0; k <= m; ++k) {
    ys[k] = static_cast<double>(k) / m;
    vals[k] = g_tilde(rho, ys[k], P);
  }
  const double vmin = *std::min_element(vals.begin(), vals.end());
  const double vmax = *std::max_element(vals.begin(), vals.end());

  InviscidMin out;
  if (vmax - vmin <= flat_tol) {
    out.value = vmin;
    out.argmins = ys;
    out.flat = true;
    return out;
  }

  auto f = [&](double y) { return g_tilde(rho, y, P); };
  std::vector<std::pair<double, double>> cands;  // (value, y)
  if (vals[0] <= vals[1]) cands.emplace_back(vals[0], ys[0]);
  if (vals[m] <= vals[m - 1]) cands.emplace_back(vals[m], ys[m]);
  for (int k = 1; k < m; ++k) {
    if (vals[k] <= vals[k - 1] && vals[k] <= vals[k + 1]) {
      double v;
      const double y = golden_min(f, ys[k - 1], ys[k + 1], &v);
      cands.emplace_back(v, y);
    }
  }
  std::sort(cands.begin(), cands.end());
  out.value = cands.front().first;
  for (const auto& [v, y] : cands) {
    if (v > out.value + val_tol) break;
    bool dup = false;
    for (double seen : out.argmins)
      if (std::fabs(seen - y) < 1e-6) dup = true;
    if (!dup) out.argmins.push_back(y);
  }
  std::sort(out.argmins.begin(), out.argmins.end());
  return out;
}

double inviscid_s(const Profile& rho, const Params& P) {
  const InviscidMin a = minimize_inviscid(rho, P);
  const InviscidMin b =
      minimize_inviscid(inviscid_stationary(P, rho.grid), P);
  return a.value - b.value;
}

Profile build_test_density(const Grid& g, const Params& P,
                           const TransitionGeometry& geom, double amplitude) {
  const Thresholds th = thresholds(P);
  const double band = std::min(th.a - th.a_minus, th.a_plus - th.a);
  if (!(amplitude > 0.0) || amplitude >= band)
    throw std::invalid_argument(
        "build_test_density: amplitude must lie in (0, min(A-A-, A+-A))");

  const int im = snap_node(g, geom.y_minus, "build_test_density");
  const int i0 = snap_node(g, geom.y0, "build_test_density");
  const int ip = snap_node(g, geom.y_plus, "build_test_density");
  if (!(im < i0 && i0 < ip) || i0 - im < 2 || ip - i0 < 2)
    throw std::invalid_argument(
        "build_test_density: need y- < y0 < y+ with room for the lobes");

  const double ym = g.x(im), y0 = g.x(i0), yp = g.x(ip);
  std::vector<double> w(g.n, 0.0);
  for (int i = 0; i < g.n; ++i) {
    const double x = g.x(i);
    if (i < im && ym > 0.0)
      w[i] = -std::sin(0.5 * kPi * (ym - x) / ym);
    else if (i > im && i < i0)
      w[i] = std::sin(kPi * (x - ym) / (y0 - ym));
    else if (i > i0 && i < ip)
      w[i] = -std::sin(kPi * (x - y0) / (yp - y0));
    else if (i > ip && yp < 1.0)
      w[i] = std::sin(0.5 * kPi * (x - yp) / (1.0 - yp));
  }

  // trapezoids with zero endpoints reduce to plain interior sums
  double t_plus = 0.0, t_minus = 0.0;
  for (int i = im + 1; i < i0; ++i) t_plus += g.h * w[i];
  for (int i = i0 + 1; i < ip; ++i) t_minus += g.h * w[i];
  if (!(t_plus > 0.0) || !(t_minus < 0.0))
    throw std::invalid_argument("build_test_density: degenerate lobes");
  const double gamma = -t_plus / t_minus;
  for (int i = i0 + 1; i < ip; ++i) w[i] *= gamma;

  Profile rho(g);
  for (int i = 0; i < g.n; ++i) rho[i] = th.a + amplitude * w[i];

  for (int i = im; i <= ip; ++i)
    if (!(rho[i] > th.a_minus && rho[i] < th.a_plus))
      throw std::runtime_error(
          "build_test_density: balance rescale left the (A-, A+) band");
  for (int i = 0; i < g.n; ++i) {
    const bool below = (i < im) || (i > i0 && i < ip);
    const bool above = (i > im && i < i0) || (i > ip);
    if ((below && !(rho[i] < th.a)) || (above && !(rho[i] > th.a)))
      throw std::runtime_error("build_test_density: sign pattern violated");
  }
  return rho;
}

Profile raised_cosine_bump(const Grid& g, double a, double b) {
  if (!(a < b))
    throw std::invalid_argument("raised_cosine_bump: need a < b");
  Profile lam(g, 0.0);
  for (int i = 0; i < g.n; ++i) {
    const double x = g.x(i);
    if (x > a && x < b) {
      const double s = std::sin(kPi * (x - a) / (b - a));
      lam[i] = s * s;
    }
  }
  const double total = integrate(lam);
  if (!(total > 0.0))
    throw std::invalid_argument("raised_cosine_bump: no interior nodes");
  for (int i = 0; i < g.n; ++i) lam[i] /= total;
  return lam;
}

namespace {

Profile perturbed_density(const Profile& rho_base, const Profile& lambda_bump,
                          double alpha, const Params& P,
                          const TransitionGeometry& geom) {
  if (rho_base.grid != lambda_bump.grid)
    throw std::invalid_argument("g_alpha: grid mismatch");
  const Grid& g = rho_base.grid;
  Profile rho(g);
  for (int i = 0; i < g.n; ++i) rho[i] = rho_base[i] + alpha * lambda_bump[i];

  const Thresholds th = thresholds(P);
  const int im = snap_node(g, geom.y_minus, "g_alpha");
  const int i0 = snap_node(g, geom.y0, "g_alpha");
  const int ip = snap_node(g, geom.y_plus, "g_alpha");
  for (int i = im; i <= ip; ++i)
    if (!(rho[i] > th.a_minus && rho[i] < th.a_plus))
      throw std::invalid_argument(
          "g_alpha: perturbed density leaves the (A-, A+) band");
  for (int i = im + 1; i < i0; ++i)
    if (!(rho[i] > th.a))
      throw std::invalid_argument(
          "g_alpha: perturbed density loses the two-well sign pattern");
  for (int i = i0 + 1; i < ip; ++i)
    if (!(rho[i] < th.a))
      throw std::invalid_argument(
          "g_alpha: perturbed density loses the two-well sign pattern");
  return rho;
}

FixedPointResult solve_half(const Profile& rho_a, double seed_y, bool upper,
                            double eps, const Params& P, int i0) {
  const Grid& g = rho_a.grid;
  const Profile seed = smoothed_step(g, P, seed_y, eps);
  FixedPointResult fp;
  bool ok = false;
  try {
    fp = picard(rho_a, seed, eps, P);
    ok = fp.converged;
  } catch (const std::exception&) {
    ok = false;
  }
  if (!ok) {
    try {
      const FlowResult fl = gradient_flow(rho_a, seed, eps, P);
      FixedPointResult cand = fl.fp;
      try {
        PicardOptions po;
        po.max_iter = 300;
        const FixedPointResult pol = picard(rho_a, cand.phi, eps, P, po);
        if (pol.converged) cand = pol;
      } catch (const std::exception&) {
      }
      if (fl.converged || cand.converged) {
        fp = cand;
        ok = true;
      }
    } catch (const std::exception&) {
      ok = false;
    }
  }
  if (!ok)
    throw std::runtime_error("g_alpha: no solver converged within a half");

  const double at0 = fp.phi[i0];
  const bool member = upper ? (at0 >= P.phibar() - 1e-9)
                            : (at0 <= P.phibar() + 1e-9);
  if (!member) {
    // The solve left its half: the restricted minimizer over this half does
    // not exist as an interior critical point (single-basin regime).
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "g_alpha: %s-half solve escaped its half "
                  "(phi(y0) = %.6f vs phibar = %.6f)",
                  upper ? "minus" : "plus", at0, P.phibar());
    throw std::runtime_error(buf);
  }
  return fp;
}

}  // namespace

GAlphaResult g_alpha_full(const Profile& rho_base, const Profile& lambda_bump,
                          double alpha, double eps, const Params& P,
                          const TransitionGeometry& geom) {
  const Profile rho_a = perturbed_density(rho_base, lambda_bump, alpha, P, geom);
  const int i0 = snap_node(rho_base.grid, geom.y0, "g_alpha");
  GAlphaResult out;
  out.minus_min = solve_half(rho_a, geom.y_minus, /*upper=*/true, eps, P, i0);
  out.plus_min = solve_half(rho_a, geom.y_plus, /*upper=*/false, eps, P, i0);
  out.value = out.plus_min.g_value - out.minus_min.g_value;
  return out;
}

double g_alpha(const Profile& rho_base, const Profile& lambda_bump,
               double alpha, double eps, const Params& P,
               const TransitionGeometry& geom) {
  return g_alpha_full(rho_base, lambda_bump, alpha, eps, P, geom).value;
}

TransitionReport find_transition(const Profile& rho_base,
                                 const Profile& lambda_bump, double delta,
                                 double eps, const Params& P,
                                 const TransitionGeometry& geom, double tol,
                                 double sep_tol) {
  if (!(delta > 0.0))
    throw std::invalid_argument("find_transition: delta must be > 0");
  TransitionReport rep;
  rep.eps = eps;

  const GAlphaResult g_lo =
      g_alpha_full(rho_base, lambda_bump, -delta, eps, P, geom);
  rep.g_trace.emplace_back(-delta, g_lo.value);
  const GAlphaResult g_hi =
      g_alpha_full(rho_base, lambda_bump, delta, eps, P, geom);
  rep.g_trace.emplace_back(delta, g_hi.value);
  if (!(g_lo.value < 0.0 && g_hi.value > 0.0))
    throw std::runtime_error(
        "find_transition: sign bracket g(-delta) < 0 < g(delta) fails "
        "(single-minimizer regime)");

  double lo = -delta, hi = delta;
  bool found = false;
  for (int it = 0; it < 80 && !found; ++it) {
    const double mid = 0.5 * (lo + hi);
    const GAlphaResult gm =
        g_alpha_full(rho_base, lambda_bump, mid, eps, P, geom);
    rep.g_trace.emplace_back(mid, gm.value);
    if (std::fabs(gm.value) <= tol) {
      rep.alpha0 = mid;
      rep.minimizer_minus = gm.minus_min;
      rep.minimizer_plus = gm.plus_min;
      found = true;
    } else if (gm.value > 0.0) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  if (!found)
    throw std::runtime_error("find_transition: root tolerance not reached");
  rep.bracket_width = hi - lo;
  rep.separation = sup_dist(rep.minimizer_minus.phi, rep.minimizer_plus.phi);
  if (rep.separation < sep_tol)
    throw std::runtime_error(
        "find_transition: the two restricted minimizers coincide");
  return rep;
}

BifurcationRow bifurcation_point(const Profile& rho_base,
                                 const Profile& lambda_bump, double delta,
                                 double eps, const Params& P,
                                 const TransitionGeometry& geom, double tol) {
  BifurcationRow row;
  row.eps = eps;
  row.alpha0 = std::numeric_limits<double>::quiet_NaN();
  try {
    row.g_minus = g_alpha(rho_base, lambda_bump, -delta, eps, P, geom);
    row.g_plus = g_alpha(rho_base, lambda_bump, delta, eps, P, geom);
  } catch (const std::exception& e) {
    row.note = e.what();
    return row;
  }
  row.bracket_ok = row.g_minus < 0.0 && row.g_plus > 0.0;
  double alpha_eval = 0.0;
  if (row.bracket_ok) {
    try {
      const TransitionReport rep = find_transition(rho_base, lambda_bump,
                                                   delta, eps, P, geom, tol);
      row.alpha0 = rep.alpha0;
      row.separation = rep.separation;
      alpha_eval = rep.alpha0;
    } catch (const std::exception& e) {
      row.note = e.what();
      row.bracket_ok = false;
    }
  } else {
    row.note = "no sign change on [-delta, delta]";
  }
  try {
    const Profile rho_a =
        perturbed_density(rho_base, lambda_bump, alpha_eval, P, geom);
    const MinimizationReport mr =
        quasi_potential(rho_a, eps, P, EnumerateOptions{});
    row.n_minimizers = mr.n_minimizers;
  } catch (const std::exception& e) {
    if (row.note.empty()) row.note = e.what();
  }
  return row;
}

std::vector<BifurcationRow> bifurcation_scan(
    const Profile& rho_base, const Profile& lambda_bump, double delta,
    const std::vector<double>& eps_list, const Params& P,
    const TransitionGeometry& geom, double tol, int jobs) {
  std::vector<BifurcationRow> rows(eps_list.size());
  run_parallel(static_cast<int>(eps_list.size()), jobs, [&](int i) {
    rows[i] = bifurcation_point(rho_base, lambda_bump, delta, eps_list[i], P,
                                geom, tol);
  });
  return rows;
}

GammaScanReport gamma_scan(const Profile& rho,
                           const std::vector<double>& eps_list,
                           const Params& P, int jobs) {
  GammaScanReport rep;
  const InviscidMin at_rho = minimize_inviscid(rho, P);
  const InviscidMin at_bar =
      minimize_inviscid(inviscid_stationary(P, rho.grid), P);
  rep.s_inviscid = at_rho.value - at_bar.value;
  rep.inviscid_argmins = at_rho.argmins;

  rep.rows.resize(eps_list.size());
  run_parallel(static_cast<int>(eps_list.size()), jobs, [&](int k) {
    GammaScanRow row;
    row.eps = eps_list[k];
    const MinimizationReport mr =
        quasi_potential(rho, eps_list[k], P, EnumerateOptions{});
    row.s_eps = mr.s_eps;
    row.s_inviscid = rep.s_inviscid;
    row.gap = std::fabs(row.s_eps - rep.s_inviscid);
    const Profile& phi_min = mr.fixed_points.front().phi;
    double best_sup = std::numeric_limits<double>::infinity();
    double best_l1 = best_sup;
    for (double y : rep.inviscid_argmins) {
      const Profile st = step_phi(rho.grid, P, y);
      best_sup = std::min(best_sup, sup_dist(phi_min, st));
      best_l1 = std::min(best_l1, l1_dist(phi_min, st));
    }
    row.sup_dist = best_sup;
    row.l1_dist = best_l1;
    rep.rows[k] = row;
  });

  int inversions = 0;
  for (size_t k = 1; k < rep.rows.size(); ++k)
    if (rep.rows[k].gap >= rep.rows[k - 1].gap) ++inversions;
  rep.gap_monotone = inversions <= 1;
  return rep;
}

}  // namespace bqp
