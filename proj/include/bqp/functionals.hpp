// Entropy, mobility, the viscous trial functional and its inviscid limit,
// the second-variation form at a critical profile, and the two Hamiltonians
// used for static/dynamic consistency checks.
#pragma once

#include <vector>

#include "bqp/grid.hpp"

namespace bqp {

// s(a) = a log a + (1-a) log(1-a); 0 at the endpoints, +inf outside [0,1].
double entropy(double a);

// s'(a) = log(a/(1-a)); domain error at the endpoints.
double entropy_prime(double a);

// sigma(a) = a(1-a).
inline double mobility(double a) { return a * (1.0 - a); }

// Numerically stable 1/(1+e^{-t}) and log(1+e^t).
double sigmoid(double t);
double softplus(double t);

// Trial functional at viscosity eps:
//   integral of s(rho) + s(eps*phi_x) + (1-rho)*phi - log(1+e^phi).
// Returns +inf when eps*phi_x leaves [0,1] beyond a 1e-12 slack (the
// functional's effective domain).  phi_x is formed by ddx.
double g_eps(const Profile& rho, const Profile& phi, double eps);

// Same with caller-supplied nodal slopes (use when analytic slopes exist).
double g_eps_with_slope(const Profile& rho, const Profile& phi,
                        const std::vector<double>& phi_x, double eps);

// Lambda(phi) = integral of s(eps*phi_x) + phi - log(1+e^phi); +inf outside
// the same slope domain.  g_eps(rho,phi) = integral s(rho) - <rho,phi> + Lambda(phi).
double lambda_functional(const Profile& phi, double eps);

// Inviscid trial functional: integral of s(rho) + (1-rho)*phi - log(1+e^phi).
double g_inviscid(const Profile& rho, const Profile& phi);

// Inviscid functional restricted to single-jump profiles, as a function of
// the jump location y in [0,1]:
//   integral s(rho) + phi0*int_0^y (1-rho) + phi1*int_y^1 (1-rho)
//   - y log(1+e^phi0) - (1-y) log(1+e^phi1).
// Partial integrals split the containing cell exactly (linear interpolation).
double g_tilde(const Profile& rho, double y, const Params& P);

// Quadratic form of the second variation at phi:
//   Q(h) = integral of eps*h_x^2/(phi_x(1-eps*phi_x)) - e^phi h^2/(1+e^phi)^2,
// for h vanishing at both ends.
double second_variation_value(const Profile& phi, double eps, const Profile& h);

// Smallest eigenvalue of Q relative to the L2 mass on H^1_0, via Sturm
// bisection on the assembled tridiagonal pencil.  scale_out (optional)
// receives a Gershgorin magnitude bound used for sign classification.
double second_variation_min_eig(const Profile& phi, double eps,
                                double* scale_out = nullptr);
double second_variation_min_eig(const Profile& phi,
                                const std::vector<double>& phi_x, double eps,
                                double* scale_out = nullptr);

// H(rho,h) = eps <h_x, sigma(rho) h_x> - <eps rho_x - f(rho), h_x>, f = sigma.
// Requires h(0) = h(1) = 0.  The first form differentiates by ddx; the
// second takes analytic nodal derivatives for tight tolerance checks.
double hamiltonian(const Profile& rho, const Profile& h, double eps);
double hamiltonian_with_derivs(const Grid& g, const std::vector<double>& rho_v,
                               const std::vector<double>& rho_x,
                               const std::vector<double>& h_x, double eps);

// Boundary-adapted Hamiltonian on momenta anchored at (phi0, phi1):
//   Hhat(rho,w) = -eps <w_x, sigma(rho) w_x> - eps <rho, w_xx> + <sigma(rho), w_x>
//                 - rho1 (1 - eps w_x(1)) + rho0 (1 - eps w_x(0)).
double hamiltonian_hat(const Profile& rho, const Profile& w, double eps,
                       const Params& P);
double hamiltonian_hat_with_derivs(const Grid& g,
                                   const std::vector<double>& rho_v,
                                   const std::vector<double>& w_x,
                                   const std::vector<double>& w_xx, double eps,
                                   const Params& P);

}  // namespace bqp
