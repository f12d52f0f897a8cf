// Time-dependent side: the viscous Burgers solver, the entropy-variable
// relaxation path, the optimal excursion built from its time reversal, and
// the two independent evaluations of the path action.
#pragma once

#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "bqp/grid.hpp"
#include "bqp/minimization.hpp"

namespace bqp {

// Uniformly spaced time slices; frames[j] holds nodal values at t0 + j*dt.
struct TimePath {
  Grid grid;
  double t0 = 0.0;
  double t1 = 0.0;
  double dt = 0.0;
  std::vector<Profile> frames;

  int n_frames() const { return static_cast<int>(frames.size()); }
  double t(int j) const { return t0 + j * dt; }
};

// Semi-implicit viscous Burgers u_t + f(u)_x = eps u_xx on [0,1] with the
// ends held at (rho0, rho1): diffusion by backward Euler (tridiagonal solve),
// flux by explicit centered differences.  Requires the advective CFL dt <= h.
// Every frame is checked against the maximum principle
// [min(u0, rho0), max(u0, rho1)] + 1e-10 slack.
TimePath burgers_solve(const Profile& rho_init, double eps, const Params& P,
                       double T, double dt);

struct RelaxResult {
  TimePath path;      // density frames; the final frame is the exact
                      // stationary profile, appended once within tol
  Profile rho_bar;
  double current = 0.0;
  double t_relax = 0.0;     // time of the first frame within tol
  double final_dist = 0.0;  // sup distance of that frame to the target
  bool converged = false;   // false when t_cap or a stall hit first
};

// Run the Burgers flow until it is within tol of the stationary profile
// (or stalls at the discrete equilibrium, or reaches t_cap).
RelaxResult burgers_relax(const Profile& rho_init, double eps, const Params& P,
                          double dt, double tol = 1e-6, double t_cap = 400.0);

// Entropy variable along the relaxation started from F0 = sigmoid(phi):
// frames are s'(F(t)).  Asserts every frame stays inside the slope band
// 0 <= eps*psi_x <= 1 (small slack); F itself obeys the maximum principle.
TimePath psi_path(const Profile& phi, double eps, const Params& P, double T,
                  double dt);

// Terminal distance of a psi path to s'(rho_bar): (value sup, slope sup).
std::pair<double, double> psi_terminal_distance(const TimePath& psi,
                                                double eps, const Params& P);

struct ExcursionOptions {
  double dt = 0.0;           // 0 -> grid spacing
  double relax_tol = 1e-6;
  double t_cap = 400.0;
  double slope_guard = 1e-8;  // reject frames where psi_x(1-eps psi_x) dips below
  double el_tol = 1e-4;       // precondition on the fixed point's defect
};

struct ExcursionResult {
  TimePath u;        // t in [-T, 0]: u(-T) = stationary profile, u(0) = rho
  TimePath control;  // H = s'(u(t)) - psi(-t); zero at the ends for t < 0
  double t_horizon = 0.0;
  // sup |reconstructed u(0) - rho|: the formula-built terminal frame before
  // it is swapped for the exact input (pure h^2 discretization measure)
  double u0_recon_defect = 0.0;
  double boundary_defect = 0.0;  // sup over frames of the pre-pinning
                                 // endpoint defect of the reconstruction
  double relax_final_dist = 0.0;
  bool relax_converged = false;
  Profile rho_bar;
};

// Optimal escape from the stationary profile to rho, built by reversing the
// relaxation of F = sigmoid(phi*) in time:
//   v = (1+e^psi)^-1 - eps psi_xx / (psi_x (1 - eps psi_x)),  u(t) = v(-t),
// with psi = s'(F).  The terminal frame is replaced by the exact rho (the
// reconstruction defect is recorded); frame endpoints are pinned to
// (rho0, rho1); before pinning, the reconstructed frames meet the boundary
// values to first order in h (the recorded boundary_defect).
ExcursionResult excursion_path(const Profile& rho, const FixedPointResult& fp,
                               double eps, const Params& P,
                               const ExcursionOptions& opt = {});

struct ActionReport {
  double action = 0.0;
  std::vector<double> per_slice;  // instantaneous rate at each frame
  double t0 = 0.0, t1 = 0.0, dt = 0.0;
  int n_frames = 0;
  double static_value = 0.0;  // caller-supplied comparison value
  double rel_gap = 0.0;       // |action - static| / max(1, |static|)
  bool has_static = false;
};

// Rate per slice eps * int sigma(u) H_x^2 dx (trapezoid, H_x by ddx), then a
// trapezoid in time.  Control frames must vanish at both ends (1e-7 slack);
// the terminal frame is exempt, since a target density with boundary values
// away from (rho0, rho1) carries a nonzero terminal control there.
ActionReport action_of_controlled_path(
    const TimePath& u, const TimePath& control, double eps,
    double static_value = std::numeric_limits<double>::quiet_NaN());

// Independent route: per slice, assemble r = u_t + f(u)_x - eps u_xx with the
// solver's own spatial stencils (u_t centered in time, one-sided second order
// at the end frames), solve -2 eps (sigma(u) H_x)_x = r with H = 0 at both
// ends, and integrate the same rate.  Throws when sigma(u) < sigma_min
// anywhere (degenerate operator).
ActionReport action_via_elliptic(
    const TimePath& u, double eps, const Params& P,
    double static_value = std::numeric_limits<double>::quiet_NaN(),
    double sigma_min = 1e-10);

struct StaticDynamicRow {
  double g_value = 0.0;
  double static_value = 0.0;     // g_value - S_naught(stationary)
  double action_control = 0.0;
  double action_elliptic = 0.0;
  double rel_gap_control = 0.0;  // |action_control - static| / max(1,|static|)
  double rel_gap_routes = 0.0;   // |control - elliptic| / max(|..|, 1e-12)
  double u0_recon_defect = 0.0;
  std::string kind;
};

struct StaticDynamicReport {
  double s_naught = 0.0;
  double s_naught_stationary = 0.0;
  double s_eps = 0.0;
  std::vector<StaticDynamicRow> rows;  // one per minimizer
  double max_rel_gap = 0.0;
};

// Close the loop: for every minimizer of the trial functional at rho, build
// the excursion and compare its action (both routes) with the static value.
StaticDynamicReport verify_static_dynamic(const Profile& rho, double eps,
                                          const Params& P,
                                          const ExcursionOptions& opt = {},
                                          const EnumerateOptions& eopt = {});

}  // namespace bqp
