#pragma once

#include <Eigen/Dense>

#include "revlab/local_operator.hpp"
#include "revlab/state.hpp"

namespace revlab {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

enum class NormMode { Exact, Triangle };

inline constexpr int kDenseSiteLimit = 14;       // 2^14 full-space matrices
inline constexpr int kExactNormSiteLimit = 12;   // joint support for exact norms

// Dense 2^n matrix from the bitmask form. The independent test oracle builds
// the same matrix by per-site Kronecker products; keep the two paths separate.
inline MatrixXcd to_dense(const PauliString& p) {
  const int n = p.n_sites();
  if (n > kDenseSiteLimit) throw DimensionLimitError("dense pauli beyond site limit");
  const std::size_t dim = std::size_t(1) << n;
  MatrixXcd m = MatrixXcd::Zero(dim, dim);
  const complexd ph = PauliString::ipow(p.phase_exponent());
  for (std::size_t col = 0; col < dim; ++col) {
    complexd v = ph;
    if ((std::popcount(p.zmask() & col) & 1) != 0) v = -v;
    m(col ^ p.xmask(), col) = v;
  }
  return m;
}

inline MatrixXcd to_dense(const LocalOperator& o) {
  const int n = o.n_sites();
  if (n > kDenseSiteLimit) throw DimensionLimitError("dense operator beyond site limit");
  const std::size_t dim = std::size_t(1) << n;
  MatrixXcd m = MatrixXcd::Zero(dim, dim);
  for (const auto& t : o.terms()) {
    const complexd c = t.coeff * PauliString::ipow(t.op.phase_exponent());
    for (std::size_t col = 0; col < dim; ++col) {
      complexd v = c;
      if ((std::popcount(t.op.zmask() & col) & 1) != 0) v = -v;
      m(col ^ t.op.xmask(), col) += v;
    }
  }
  return m;
}

// Restriction of the operator to its joint support (identity factors dropped);
// sites_out receives the support in ascending order.
inline MatrixXcd to_dense_on_support(const LocalOperator& o, std::vector<int>* sites_out = nullptr) {
  std::vector<int> sites = o.support();
  if (sites.empty()) sites.push_back(0);  // pure identity: a 2x2 block
  if (int(sites.size()) > kExactNormSiteLimit)
    throw DimensionLimitError("joint support too large for a dense restriction");
  if (sites_out) *sites_out = sites;
  const int s = int(sites.size());
  const std::size_t dim = std::size_t(1) << s;
  MatrixXcd m = MatrixXcd::Zero(dim, dim);
  for (const auto& t : o.terms()) {
    // compress masks onto the support
    std::uint64_t cx = 0, cz = 0;
    for (int j = 0; j < s; ++j) {
      if ((t.op.xmask() >> sites[j]) & 1u) cx |= std::uint64_t(1) << j;
      if ((t.op.zmask() >> sites[j]) & 1u) cz |= std::uint64_t(1) << j;
    }
    const complexd c = t.coeff * PauliString::ipow(t.op.phase_exponent());
    for (std::size_t col = 0; col < dim; ++col) {
      complexd v = c;
      if ((std::popcount(cz & col) & 1) != 0) v = -v;
      m(col ^ cx, col) += v;
    }
  }
  return m;
}

inline VectorXcd to_eigen(const StateVector& psi) {
  return Eigen::Map<const VectorXcd>(psi.amps().data(), psi.dim());
}

inline StateVector from_eigen(int n_sites, const VectorXcd& v, Representation rep = Representation::Full) {
  std::vector<complexd> a(v.data(), v.data() + v.size());
  if (rep == Representation::Full) return StateVector::from_amplitudes(n_sites, std::move(a));
  return StateVector::collective(n_sites, std::move(a));
}

struct EigenSystem {
  VectorXd values;   // ascending
  MatrixXcd vectors; // columns
};

inline EigenSystem hermitian_eigensystem(const MatrixXcd& m) {
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(m);
  if (es.info() != Eigen::Success) throw NotConvergedError("dense eigensolver failed");
  return {es.eigenvalues(), es.eigenvectors()};
}

// Largest singular value of the dense restriction to the joint support.
inline double operator_norm_exact(const LocalOperator& o) {
  MatrixXcd m = to_dense_on_support(o);
  if ((m - m.adjoint()).cwiseAbs().maxCoeff() < 1e-13 * (1.0 + m.cwiseAbs().maxCoeff())) {
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(m, Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().maxCoeff();
  }
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(MatrixXcd(m.adjoint() * m), Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

// Exact mode = largest singular value on the joint support; triangle mode =
// sum of |coeff| (equals the exact norm for a single Pauli term).
inline double operator_norm(const LocalOperator& o, NormMode mode) {
  if (mode == NormMode::Triangle) return o.triangle_norm();
  return operator_norm_exact(o);
}

}  // namespace revlab
