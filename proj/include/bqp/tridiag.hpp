// Thomas algorithm for tridiagonal systems.  No pivoting; callers supply
// diagonally dominant or SPD systems.
#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace bqp {

// Solves a*x_{i-1} + b*x_i + c*x_{i+1} = d, i = 0..m-1 (a[0], c[m-1] unused).
inline std::vector<double> solve_tridiagonal(const std::vector<double>& a,
                                             const std::vector<double>& b,
                                             const std::vector<double>& c,
                                             const std::vector<double>& d) {
  const std::size_t m = b.size();
  if (a.size() != m || c.size() != m || d.size() != m)
    throw std::invalid_argument("solve_tridiagonal: size mismatch");
  std::vector<double> cp(m), dp(m), x(m);
  double beta = b[0];
  if (beta == 0.0) throw std::runtime_error("solve_tridiagonal: zero pivot");
  cp[0] = c[0] / beta;
  dp[0] = d[0] / beta;
  for (std::size_t i = 1; i < m; ++i) {
    beta = b[i] - a[i] * cp[i - 1];
    if (beta == 0.0) throw std::runtime_error("solve_tridiagonal: zero pivot");
    cp[i] = c[i] / beta;
    dp[i] = (d[i] - a[i] * dp[i - 1]) / beta;
  }
  x[m - 1] = dp[m - 1];
  for (std::size_t i = m - 1; i-- > 0;) x[i] = dp[i] - cp[i] * x[i + 1];
  return x;
}

}  // namespace bqp
