#include "bqp/grid.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace bqp {

Grid::Grid(int n_nodes) : n(n_nodes) {
  if (n < 3) throw std::invalid_argument("Grid: need at least 3 nodes");
  h = 1.0 / (n - 1);
}

Profile::Profile(const Grid& g, std::vector<double> vals)
    : grid(g), v(std::move(vals)) {
  if (static_cast<int>(v.size()) != g.n)
    throw std::invalid_argument("Profile: value count does not match grid");
}

Params::Params(double r0, double r1) : rho0(r0), rho1(r1) {
  if (!(0.0 < r0 && r0 < r1 && r1 < 1.0))
    throw std::invalid_argument("Params: need 0 < rho0 < rho1 < 1");
  phi0 = std::log(rho0 / (1.0 - rho0));
  phi1 = std::log(rho1 / (1.0 - rho1));
  eps0 = 1.0 / (phi1 - phi0);
}

double integrate(const Profile& p) {
  const int n = p.n();
  double s = 0.5 * (p[0] + p[n - 1]);
  for (int i = 1; i < n - 1; ++i) s += p[i];
  return s * p.grid.h;
}

std::vector<double> cum_integrate(const Grid& g, const std::vector<double>& f) {
  std::vector<double> out(g.n, 0.0);
  for (int i = 1; i < g.n; ++i)
    out[i] = out[i - 1] + 0.5 * g.h * (f[i - 1] + f[i]);
  return out;
}

std::vector<double> cum_integrate(const Profile& p) {
  return cum_integrate(p.grid, p.v);
}

Profile ddx(const Profile& p) {
  const int n = p.n();
  const double h = p.grid.h;
  Profile d(p.grid);
  for (int i = 1; i < n - 1; ++i) d[i] = (p[i + 1] - p[i - 1]) / (2.0 * h);
  d[0] = (-3.0 * p[0] + 4.0 * p[1] - p[2]) / (2.0 * h);
  d[n - 1] = (3.0 * p[n - 1] - 4.0 * p[n - 2] + p[n - 3]) / (2.0 * h);
  return d;
}

Profile d2dx2(const Profile& p) {
  const int n = p.n();
  const double h2 = p.grid.h * p.grid.h;
  Profile d(p.grid);
  for (int i = 1; i < n - 1; ++i) d[i] = (p[i + 1] - 2.0 * p[i] + p[i - 1]) / h2;
  d[0] = d[1];
  d[n - 1] = d[n - 2];
  return d;
}

double sup_norm(const std::vector<double>& a) {
  double m = 0.0;
  for (double x : a) m = std::max(m, std::fabs(x));
  return m;
}

double sup_dist(const Profile& a, const Profile& b) {
  if (a.grid != b.grid) throw std::invalid_argument("sup_dist: grid mismatch");
  double m = 0.0;
  for (int i = 0; i < a.n(); ++i) m = std::max(m, std::fabs(a[i] - b[i]));
  return m;
}

double l1_dist(const Profile& a, const Profile& b) {
  if (a.grid != b.grid) throw std::invalid_argument("l1_dist: grid mismatch");
  Profile d(a.grid);
  for (int i = 0; i < a.n(); ++i) d[i] = std::fabs(a[i] - b[i]);
  return integrate(d);
}

void write_profile_csv(const Profile& p, const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw std::runtime_error("write_profile_csv: cannot open " + path);
  std::fputs("x,value\n", f);
  for (int i = 0; i < p.n(); ++i)
    std::fprintf(f, "%.17g,%.17g\n", p.grid.x(i), p[i]);
  std::fclose(f);
}

Profile read_profile_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_profile_csv: cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line.rfind("x,value", 0) != 0)
    throw std::runtime_error("read_profile_csv: bad header in " + path);
  std::vector<double> xs, vs;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string a, b;
    if (!std::getline(row, a, ',') || !std::getline(row, b))
      throw std::runtime_error("read_profile_csv: bad row in " + path);
    xs.push_back(std::stod(a));
    vs.push_back(std::stod(b));
  }
  const int n = static_cast<int>(vs.size());
  Grid g(n);
  for (int i = 0; i < n; ++i)
    if (std::fabs(xs[i] - g.x(i)) > 1e-12)
      throw std::runtime_error("read_profile_csv: nodes are not uniform on [0,1]");
  return Profile(g, std::move(vs));
}

}  // namespace bqp
