#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "revlab/errors.hpp"
#include "revlab/rng.hpp"

namespace revlab {

// Real symmetric tridiagonal tools: Sturm-count bisection for selected
// eigenvalues and shifted inverse iteration for eigenvectors. Used by the
// collective-spin sector solver (whose band decouples into two tridiagonal
// parity chains) and by the Lanczos driver.

// number of eigenvalues of T(diag, sub) strictly below x
inline int sturm_count_below(const std::vector<double>& diag, const std::vector<double>& sub,
                             double x) {
  const int n = int(diag.size());
  int count = 0;
  double d = 1.0;
  const double tiny = std::numeric_limits<double>::min() / std::numeric_limits<double>::epsilon();
  for (int i = 0; i < n; ++i) {
    double off = i == 0 ? 0.0 : sub[i - 1];
    d = diag[i] - x - off * off / d;
    if (std::abs(d) < tiny) d = d < 0 ? -tiny : tiny;
    if (d < 0) ++count;
  }
  return count;
}

inline std::pair<double, double> gershgorin_bounds(const std::vector<double>& diag,
                                                   const std::vector<double>& sub) {
  const int n = int(diag.size());
  double lo = diag[0], hi = diag[0];
  for (int i = 0; i < n; ++i) {
    double r = (i > 0 ? std::abs(sub[i - 1]) : 0.0) + (i + 1 < n ? std::abs(sub[i]) : 0.0);
    lo = std::min(lo, diag[i] - r);
    hi = std::max(hi, diag[i] + r);
  }
  return {lo, hi};
}

// k-th smallest eigenvalue (k = 0-based) by bisection
inline double tridiag_eigenvalue(const std::vector<double>& diag, const std::vector<double>& sub,
                                 int k) {
  auto [lo, hi] = gershgorin_bounds(diag, sub);
  double scale = std::max(std::abs(lo), std::abs(hi)) + 1.0;
  lo -= 1e-12 * scale;
  hi += 1e-12 * scale;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * scale; ++it) {
    double mid = 0.5 * (lo + hi);
    if (sturm_count_below(diag, sub, mid) > k)
      hi = mid;
    else
      lo = mid;
  }
  return 0.5 * (lo + hi);
}

inline std::vector<double> tridiag_lowest_eigenvalues(const std::vector<double>& diag,
                                                      const std::vector<double>& sub, int count) {
  count = std::min<int>(count, int(diag.size()));
  std::vector<double> out(count);
  for (int k = 0; k < count; ++k) out[k] = tridiag_eigenvalue(diag, sub, k);
  return out;
}

// Solves (T - sigma I) x = b in place by LDL^T with pivot clamping (standard
// inverse-iteration practice when sigma is an eigenvalue).
inline void tridiag_shifted_solve(const std::vector<double>& diag, const std::vector<double>& sub,
                                  double sigma, std::vector<double>& x) {
  const int n = int(diag.size());
  std::vector<double> d(n), l(std::max(0, n - 1));
  double scale = 0.0;
  for (int i = 0; i < n; ++i) scale = std::max(scale, std::abs(diag[i]) + std::abs(sigma));
  const double eps = 1e-14 * (scale + 1.0);
  for (int i = 0; i < n; ++i) {
    double di = diag[i] - sigma;
    if (i > 0) di -= l[i - 1] * l[i - 1] * d[i - 1];
    if (std::abs(di) < eps) di = di < 0 ? -eps : eps;
    d[i] = di;
    if (i + 1 < n) l[i] = sub[i] / di;
  }
  for (int i = 1; i < n; ++i) x[i] -= l[i - 1] * x[i - 1];
  for (int i = 0; i < n; ++i) x[i] /= d[i];
  for (int i = n - 2; i >= 0; --i) x[i] -= l[i] * x[i + 1];
}

// eigenvector for an isolated eigenvalue lambda of T
inline std::vector<double> tridiag_eigenvector(const std::vector<double>& diag,
                                               const std::vector<double>& sub, double lambda,
                                               std::uint64_t seed = 7) {
  const int n = int(diag.size());
  CounterRng rng(seed, 99);
  std::vector<double> x(n);
  for (int i = 0; i < n; ++i) x[i] = rng.normal();
  for (int pass = 0; pass < 4; ++pass) {
    tridiag_shifted_solve(diag, sub, lambda, x);
    double nn = 0.0;
    for (double v : x) nn += v * v;
    nn = std::sqrt(nn);
    for (double& v : x) v /= nn;
  }
  return x;
}

}  // namespace revlab
