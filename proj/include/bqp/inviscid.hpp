// Inviscid-limit analysis and the phase transition: the mean-density
// thresholds, single-jump minimization of the inviscid functional, the
// balanced two-well test density, the coexistence function g(alpha) and its
// root, and the viscosity scan toward the inviscid limit.
#pragma once

#include <string>
#include <utility>
#include <vector>

#include "bqp/grid.hpp"
#include "bqp/minimization.hpp"

namespace bqp {

// A   = 1 - [softplus(phi1) - softplus(phi0)] / (phi1 - phi0)
// A+  = same expression over [phi0, phibar];  A- over [phibar, phi1];
// always 0 < A- < A < A+ < 1.
struct Thresholds {
  double a = 0.0;
  double a_plus = 0.0;
  double a_minus = 0.0;
  double phibar = 0.0;
};

Thresholds thresholds(const Params& P);

// Single-jump potential: phi0 for x < y, phi1 for x >= y.
Profile step_phi(const Grid& g, const Params& P, double y);

// Minimum of the single-jump functional g_tilde(rho, .) over [0,1]:
// a y-mesh of mesh_per_node * n points with golden-section refinement around
// every mesh-local minimum.  argmins lists every location whose refined value
// ties the global one within val_tol; a landscape whose total spread is below
// flat_tol is flagged flat and the whole mesh is returned.
struct InviscidMin {
  double value = 0.0;
  std::vector<double> argmins;
  bool flat = false;
};

InviscidMin minimize_inviscid(const Profile& rho, const Params& P,
                              int mesh_per_node = 10, double val_tol = 1e-9,
                              double flat_tol = 1e-9);

// Inviscid quasi-potential: min of g_tilde at rho minus the same minimum at
// the inviscid stationary profile.
double inviscid_s(const Profile& rho, const Params& P);

// Jump locations of the two-well construction; values are snapped to grid
// nodes on use.
struct TransitionGeometry {
  double y_minus = 0.25;
  double y0 = 0.5;
  double y_plus = 0.75;
};

// Two-well test density A + amplitude * w(x): w is a continuous piecewise
// sine, negative on [0,y-), positive on (y-,y0), negative on (y0,y+),
// positive on (y+,1], vanishing at the three marked points; the middle
// negative lobe is rescaled so the discrete integral of rho - A over
// [y-,y+] vanishes.  Requires amplitude < min(A - A-, A+ - A); throws if the
// rescale would leave the (A-, A+) band.
Profile build_test_density(const Grid& g, const Params& P,
                           const TransitionGeometry& geom, double amplitude);

// Normalized raised-cosine bump supported in (a,b): discrete integral 1.
Profile raised_cosine_bump(const Grid& g, double a, double b);

// Coexistence function at perturbation alpha:
//   g(alpha) = inf over the lower half - inf over the upper half
// of the trial functional at rho + alpha*lambda, the halves being
// phi(y0) <= phibar (jump after y0, seeded at y+) and phi(y0) >= phibar
// (jump before y0, seeded at y-).  A solve that converges outside its own
// half throws: the half has no interior minimizer, so the coexistence
// structure is absent at this viscosity (single-basin regime).
struct GAlphaResult {
  double value = 0.0;
  FixedPointResult minus_min;  // upper half, phi(y0) >= phibar
  FixedPointResult plus_min;   // lower half, phi(y0) <= phibar
};

GAlphaResult g_alpha_full(const Profile& rho_base, const Profile& lambda_bump,
                          double alpha, double eps, const Params& P,
                          const TransitionGeometry& geom);

double g_alpha(const Profile& rho_base, const Profile& lambda_bump,
               double alpha, double eps, const Params& P,
               const TransitionGeometry& geom);

// Root of g on [-delta, delta] by bisection, with the pair of distinct
// restricted minimizers at the root.
struct TransitionReport {
  double eps = 0.0;
  double alpha0 = 0.0;
  double bracket_width = 0.0;
  std::vector<std::pair<double, double>> g_trace;  // (alpha, g(alpha))
  FixedPointResult minimizer_minus;
  FixedPointResult minimizer_plus;
  double separation = 0.0;  // sup-distance between the two minimizers
};

// Throws when the sign bracket g(-delta) < 0 < g(delta) fails (the
// uniqueness regime near eps0) or when the two minimizers at the root
// coincide within sep_tol.
TransitionReport find_transition(const Profile& rho_base,
                                 const Profile& lambda_bump, double delta,
                                 double eps, const Params& P,
                                 const TransitionGeometry& geom,
                                 double tol = 1e-8, double sep_tol = 1e-4);

// One bifurcation-scan cell: find_transition with failures recorded instead
// of thrown.
struct BifurcationRow {
  double eps = 0.0;
  bool bracket_ok = false;
  double alpha0 = 0.0;
  int n_minimizers = 0;
  double separation = 0.0;
  double g_minus = 0.0;  // g(-delta)
  double g_plus = 0.0;   // g(+delta)
  std::string note;
};

BifurcationRow bifurcation_point(const Profile& rho_base,
                                 const Profile& lambda_bump, double delta,
                                 double eps, const Params& P,
                                 const TransitionGeometry& geom,
                                 double tol = 1e-8);

std::vector<BifurcationRow> bifurcation_scan(const Profile& rho_base,
                                             const Profile& lambda_bump,
                                             double delta,
                                             const std::vector<double>& eps_list,
                                             const Params& P,
                                             const TransitionGeometry& geom,
                                             double tol = 1e-8, int jobs = 1);

// Viscosity scan of the quasi-potential against its inviscid limit.
struct GammaScanRow {
  double eps = 0.0;
  double s_eps = 0.0;
  double s_inviscid = 0.0;
  double gap = 0.0;       // |s_eps - s_inviscid|
  double sup_dist = 0.0;  // minimizer to nearest single-jump argmin, sup norm
  double l1_dist = 0.0;   // same in L1
};

struct GammaScanReport {
  std::vector<GammaScanRow> rows;
  double s_inviscid = 0.0;
  std::vector<double> inviscid_argmins;
  bool gap_monotone = false;  // at most one inversion along the scan
};

GammaScanReport gamma_scan(const Profile& rho, const std::vector<double>& eps_list,
                           const Params& P, int jobs = 1);

}  // namespace bqp
