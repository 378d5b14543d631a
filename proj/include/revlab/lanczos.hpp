#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include "revlab/errors.hpp"
#include "revlab/rng.hpp"
#include "revlab/tridiag.hpp"

namespace revlab {

struct LanczosOptions {
  int max_iter = 600;
  double tol = 1e-11;  // absolute residual target, caller scales it
  std::uint64_t seed = 20240311;
  std::size_t max_basis_bytes = std::size_t(3) << 30;
};

struct LanczosEig {
  double value = 0.0;
  std::vector<std::complex<double>> vector;
  bool converged = false;
  int iterations = 0;
};

namespace detail {

inline double vnorm(const std::vector<std::complex<double>>& v) {
  double s = 0.0;
  for (const auto& a : v) s += std::norm(a);
  return std::sqrt(s);
}

inline std::complex<double> vdot(const std::vector<std::complex<double>>& a,
                                 const std::vector<std::complex<double>>& b) {
  std::complex<double> s(0.0, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

inline void vaxpy(std::vector<std::complex<double>>& y, std::complex<double> c,
                  const std::vector<std::complex<double>>& x) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += c * x[i];
}

}  // namespace detail

// Lowest eigenpair by Lanczos with full reorthogonalization against both the
// Krylov basis and the deflation set (previously converged eigenvectors), so
// degenerate levels are recovered by repeated deflated runs. A vanishing beta
// (invariant subspace exhausted) surfaces as a vanishing Ritz residual.
template <class ApplyFn>
LanczosEig lanczos_lowest(std::size_t dim, ApplyFn&& apply,
                          const std::vector<const std::vector<std::complex<double>>*>& deflate,
                          const LanczosOptions& opts = {}) {
  using detail::vaxpy;
  using detail::vdot;
  using detail::vnorm;
  using cvec = std::vector<std::complex<double>>;

  const int max_iter = int(std::min<std::size_t>(opts.max_iter, dim));
  if (std::size_t(max_iter) * dim * sizeof(std::complex<double>) > opts.max_basis_bytes)
    throw DimensionLimitError("Lanczos basis would exceed the memory cap");

  CounterRng rng(opts.seed, 1 + deflate.size());
  cvec start(dim);
  for (auto& a : start) a = {rng.normal(), rng.normal()};
  for (int pass = 0; pass < 2; ++pass)
    for (const auto* d : deflate) vaxpy(start, -vdot(*d, start), *d);
  double start_norm = vnorm(start);
  if (start_norm < 1e-12)
    throw NotConvergedError("no start vector outside the deflation space");
  for (auto& a : start) a /= start_norm;

  std::vector<cvec> V{std::move(start)};
  std::vector<double> alpha, beta;
  cvec w(dim);

  for (int j = 0; j < max_iter; ++j) {
    apply(V[j], w);
    if (j > 0) vaxpy(w, -beta[j - 1], V[j - 1]);
    double a = vdot(V[j], w).real();
    alpha.push_back(a);
    vaxpy(w, std::complex<double>(-a, 0.0), V[j]);
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto* d : deflate) vaxpy(w, -vdot(*d, w), *d);
      for (const auto& b : V) vaxpy(w, -vdot(b, w), b);
    }
    const double b = vnorm(w);

    const int m = int(alpha.size());
    const double theta = tridiag_eigenvalue(alpha, beta, 0);
    std::vector<double> y =
        m == 1 ? std::vector<double>{1.0} : tridiag_eigenvector(alpha, beta, theta, opts.seed);
    const double resid = b * std::abs(y.back());

    if (resid <= opts.tol || j + 1 == max_iter || V.size() + deflate.size() >= dim) {
      LanczosEig out;
      out.value = theta;
      out.iterations = m;
      out.converged = resid <= opts.tol;
      out.vector.assign(dim, {0.0, 0.0});
      for (int i = 0; i < m; ++i) vaxpy(out.vector, y[i], V[i]);
      double nn = vnorm(out.vector);
      for (auto& av : out.vector) av /= nn;
      return out;
    }
    beta.push_back(b);
    for (auto& av : w) av /= b;
    V.push_back(w);
  }
  throw NotConvergedError("Lanczos failed to converge");
}

}  // namespace revlab
