// Minimization of the trial functional over monotone profiles anchored at
// (phi0, phi1): the integral fixed-point operator K with its normalization
// solve, damped Picard iteration, two alternative contraction maps, a
// Lyapunov-checked gradient flow, multi-seed enumeration of fixed points,
// and the quasi-potential assembled from them.
#pragma once

#include <string>
#include <vector>

#include "bqp/grid.hpp"
#include "bqp/stationary.hpp"

namespace bqp {

struct KResult {
  Profile phi;                // K applied to the input
  double log_a = 0.0;         // log of the normalization constant
  double a_const = 0.0;       // exp(log_a); may be huge near eps0
  std::vector<double> phi_x;  // analytic nodal slope of the output
};

// One application of the fixed-point operator at viscosity eps:
//   eps*(K phi)_x(y) = sigmoid(log A + (1/eps) int_0^y [(1+e^phi)^-1 - rho]),
// with A solved by bisection so (K phi)(1) = phi1.  Runs in log space, so
// the A-solve stays stable up to (and slightly beyond) the degenerate
// viscosity eps0 where A diverges.  Throws when no A can reach phi1.
KResult apply_k(const Profile& rho, const Profile& phi, double eps,
                const Params& P, double a_tol = 1e-12);

// The normalization constant alone: A with |(K phi)(1) - phi1| <= tol.
double solve_a(const Profile& rho, const Profile& phi, double eps,
               const Params& P, double tol = 1e-12);

struct FixedPointResult {
  Profile phi;
  std::vector<double> phi_x;  // analytic slope from the final K application
  double a_const = 0.0;
  double log_a = 0.0;
  double k_residual = 0.0;   // sup |K phi - phi| at termination
  double el_residual = 0.0;  // sup of eps*phi_xx - phi_x(1-eps*phi_x)((1+e^phi)^-1 - rho)
  double g_value = 0.0;
  double min_eig = 0.0;
  double eig_scale = 1.0;
  double delta_observed = 0.0;  // min over nodes of min(eps*phi_x, 1-eps*phi_x)
  std::string kind;  // "minimizer" | "saddle" | "undetermined" | "constrained"
  int iterations = 0;
  bool converged = false;
};

struct PicardOptions {
  double theta = 0.5;    // damping: phi <- (1-theta) phi + theta K phi
  double tol = 1e-10;    // on sup |K phi - phi|
  int max_iter = 2000;
  double a_tol = 1e-12;
};

// Damped Picard iteration from a monotone anchored seed.  Non-convergence is
// reported through the flag, not thrown (callers fall back to the flow).
FixedPointResult picard(const Profile& rho, const Profile& phi_seed, double eps,
                        const Params& P, const PicardOptions& opt = {});

struct ContractionResult {
  FixedPointResult fp;
  double contraction_factor = 0.0;  // last observed ratio of slope-metric steps
  bool projected = false;           // an iterate needed projection back into domain
};

// Alternative fixed-point maps (integrated forms of the critical equation).
// Variant 1 is contractive near eps0 for any density; variant 2 for small
// boundary gaps.  Outside those regimes they still iterate, without a
// convergence guarantee.  The metric is sup |phi_x - psi_x|.
ContractionResult contraction_k1(const Profile& rho, const Profile& phi_seed,
                                 double eps, const Params& P,
                                 const PicardOptions& opt = {});
ContractionResult contraction_k2(const Profile& rho, const Profile& phi_seed,
                                 double eps, const Params& P,
                                 const PicardOptions& opt = {});

struct FlowOptions {
  double dt0 = 0.0;          // 0 -> h/2
  double resid_tol = 1e-9;   // stop on sup of the critical-equation defect
  double diss_tol = 1e-16;   // or on the dissipation rate int defect^2/(v_x(1-eps v_x))
  double t_max = 2000.0;
  int max_steps = 4000000;
  double lyapunov_slack = 1e-10;
  int max_rejects = 20;      // consecutive halvings per step before giving up
};

struct FlowResult {
  FixedPointResult fp;
  double max_step_increase = 0.0;  // largest accepted per-step rise of the functional
  double dissipation_final = 0.0;
  int steps = 0;
  bool converged = false;
};

// Descent flow  v_t = eps v_xx + v_x(1 - eps v_x)(rho - (1+e^v)^-1)  with the
// ends pinned; implicit diffusion, explicit reaction.  Steps that would raise
// the functional are rejected with a halved dt, so the functional decreases
// along every accepted step (up to the stated slack).
FlowResult gradient_flow(const Profile& rho, const Profile& v_seed, double eps,
                         const Params& P, const FlowOptions& opt = {});

struct SeedBankOptions {
  int n_steps = 9;          // smoothed step locations 0.1 .. 0.9
  bool include_affine = true;
  bool include_stationary = true;
  bool include_entropy_seed = true;
  unsigned rng_seed = 0;    // reserved for jittered step locations (0 = off)
};

// Heuristic seed list: the affine profile, the entropy gradient of the
// stationary profile, mollified steps, and a monotone envelope of s'(rho).
std::vector<Profile> build_seed_bank(const Profile& rho, double eps,
                                     const Params& P,
                                     const SeedBankOptions& opt = {});

// Mollified single-jump profile at y (mass phi1-phi0).  The kernel width and
// a blend toward the affine profile keep eps*phi_x <= 0.98 whenever that is
// attainable; for eps near eps0 the admissible band collapses onto the affine
// profile and the output may exceed the bound (picard seeds only need the
// boundary anchors, so such seeds are still usable there).
Profile smoothed_step(const Grid& g, const Params& P, double y, double eps);

struct EnumerateOptions {
  PicardOptions picard;
  FlowOptions flow;
  SeedBankOptions seeds;
  double dedup_tol = 1e-4;  // sup-distance below which iterates are one point
};

// Runs every seed through Picard (gradient flow as fallback), deduplicates,
// and sorts by functional value.  Throws if no seed converges.
std::vector<FixedPointResult> enumerate_fixed_points(
    const Profile& rho, double eps, const Params& P,
    const EnumerateOptions& opt = {});

struct MinimizationReport {
  std::vector<FixedPointResult> fixed_points;  // sorted by g_value
  double s_naught = 0.0;             // min over fixed points of the functional
  double s_naught_stationary = 0.0;  // same for the stationary profile
  double s_eps = 0.0;                // difference: the quasi-potential
  Profile rho_bar;
  int n_minimizers = 0;
};

// Quasi-potential at rho: minimize over the anchored monotone class for rho
// and for the stationary profile, and subtract.
MinimizationReport quasi_potential(const Profile& rho, double eps,
                                   const Params& P,
                                   const EnumerateOptions& opt = {});

// Diagnostics shared with tests: the multiplied-through defect of the
// critical equation, sup over nodes (finite differences).
double el_residual_sup(const Profile& rho, const Profile& phi, double eps);

}  // namespace bqp
