// Uniform grid on [0,1], nodal profiles, and the shared second-order
// calculus kernels (trapezoid integration, first/second differences).
#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace bqp {

struct Grid {
  int n = 0;       // node count, >= 3
  double h = 0.0;  // spacing 1/(n-1)

  Grid() = default;
  explicit Grid(int n_nodes);

  double x(int i) const { return i * h; }
  bool operator==(const Grid& o) const { return n == o.n; }
  bool operator!=(const Grid& o) const { return n != o.n; }
};

// Nodal values on a grid.  Plain data; invariants are checked by the
// routines that require them.
struct Profile {
  Grid grid;
  std::vector<double> v;

  Profile() = default;
  Profile(const Grid& g, double fill = 0.0) : grid(g), v(g.n, fill) {}
  Profile(const Grid& g, std::vector<double> vals);

  int n() const { return grid.n; }
  double& operator[](int i) { return v[i]; }
  double operator[](int i) const { return v[i]; }
};

// Boundary data and derived constants.  Requires 0 < rho0 < rho1 < 1.
struct Params {
  double rho0 = 0.0;
  double rho1 = 0.0;
  double phi0 = 0.0;  // log(rho0/(1-rho0))
  double phi1 = 0.0;  // log(rho1/(1-rho1))
  double eps0 = 0.0;  // 1/(phi1-phi0), the viscosity where the current vanishes

  Params() = default;
  Params(double r0, double r1);

  double phibar() const { return 0.5 * (phi0 + phi1); }
  double mass() const { return phi1 - phi0; }
};

// Trapezoid rule over the whole interval.
double integrate(const Profile& p);

// Cumulative trapezoid: out[i] = integral from 0 to x_i.
std::vector<double> cum_integrate(const Profile& p);
std::vector<double> cum_integrate(const Grid& g, const std::vector<double>& f);

// First derivative: centered interior, one-sided second order at the ends.
Profile ddx(const Profile& p);

// Second derivative: three-point interior; endpoint values copied from the
// nearest interior node (callers never use them in integrands).
Profile d2dx2(const Profile& p);

double sup_norm(const std::vector<double>& a);
double sup_dist(const Profile& a, const Profile& b);
double l1_dist(const Profile& a, const Profile& b);

// Profile CSV: header "x,value", one row per node, 17 significant digits.
void write_profile_csv(const Profile& p, const std::string& path);
Profile read_profile_csv(const std::string& path);

}  // namespace bqp
