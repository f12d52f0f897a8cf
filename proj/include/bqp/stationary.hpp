// Stationary current and density profile of the boundary-driven problem:
// the current J solves  integral_{rho0}^{rho1} eps/(f(r)-J) dr = 1  with
// f(r) = r(1-r), and the profile integrates eps*rho_x = f(rho) - J from rho0.
#pragma once

#include "bqp/grid.hpp"

namespace bqp {

struct StationaryResult {
  double current = 0.0;       // J_eps
  Profile rho_bar;            // stationary profile on the grid
  double endpoint_defect = 0.0;  // |rho_bar(1) - rho1|
  double residual_sup = 0.0;     // max_i |f(rho_bar) - eps*ddx(rho_bar) - J|
};

// Largest admissible current: min of f over [rho0, rho1] (an endpoint value,
// f being concave).
double current_bound(const Params& P);

// Unique J in (-inf, current_bound) with unit current integral.  Bisection;
// the integral uses composite 64-point Gauss-Legendre on dyadically graded
// panels so the near-bound regime stays accurate.
double solve_current(const Params& P, double eps, double tol = 1e-12);

// RK4 integration of the profile ODE (4 substeps per cell).  Throws if the
// integration leaves [-margin, 1+margin] (a symptom of a current solved too
// loosely).
StationaryResult stationary_profile(const Params& P, double eps, const Grid& g,
                                    double current_tol = 1e-12);

// Inviscid limit of the stationary profile: constant rho0 when
// 1-(rho0+rho1) > 0, constant rho1 when < 0, and the half-interval step when
// the sum is 1 (within 1e-12).
Profile inviscid_stationary(const Params& P, const Grid& g);

}  // namespace bqp
