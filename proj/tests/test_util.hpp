// Profiles shared across the test files.
#pragma once

#include <algorithm>
#include <cmath>

#include "bqp/functionals.hpp"
#include "bqp/grid.hpp"

namespace testutil {

inline bqp::Profile affine_phi(const bqp::Grid& g, const bqp::Params& P) {
  bqp::Profile phi(g);
  for (int i = 0; i < g.n; ++i) phi[i] = P.phi0 + P.mass() * g.x(i);
  return phi;
}

// rising logistic: the stationary density at the degenerate viscosity
inline bqp::Profile logistic_rho(const bqp::Grid& g, const bqp::Params& P) {
  bqp::Profile rho(g);
  for (int i = 0; i < g.n; ++i)
    rho[i] = bqp::sigmoid(P.phi0 + P.mass() * g.x(i));
  return rho;
}

// rho = (1+e^phi)^-1 along the affine potential: the density whose critical
// equation the affine profile solves exactly, at every viscosity
inline bqp::Profile affine_fp_density(const bqp::Grid& g,
                                      const bqp::Params& P) {
  bqp::Profile rho(g);
  for (int i = 0; i < g.n; ++i)
    rho[i] = bqp::sigmoid(-(P.phi0 + P.mass() * g.x(i)));
  return rho;
}

// the clipped sine density used by the end-to-end checks
inline bqp::Profile sine_density(const bqp::Grid& g) {
  bqp::Profile rho(g);
  for (int i = 0; i < g.n; ++i) {
    const double v = 0.5 + 0.2 * std::sin(2.0 * M_PI * g.x(i));
    rho[i] = std::min(0.7, std::max(0.3, v));
  }
  return rho;
}

}  // namespace testutil
