#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include "revlab/errors.hpp"
#include "revlab/pauli.hpp"

namespace revlab {

enum class Representation { Full, CollectiveSpin };

// Complex amplitude vector: either the full 2^n computational basis
// (site 0 = least significant bit of the basis index) or a collective-spin
// sector of dimension n_sites + 1.
class StateVector {
 public:
  StateVector() = default;

  static StateVector zeros(int n_sites) {
    StateVector s;
    s.n_ = n_sites;
    s.rep_ = Representation::Full;
    if (n_sites < 1 || n_sites > 26) throw DimensionLimitError("full state vector limited to 26 sites");
    s.amps_.assign(std::size_t(1) << n_sites, complexd(0.0, 0.0));
    return s;
  }

  static StateVector basis_state(int n_sites, std::uint64_t index) {
    StateVector s = zeros(n_sites);
    s.amps_.at(index) = 1.0;
    return s;
  }

  static StateVector from_amplitudes(int n_sites, std::vector<complexd> amps) {
    StateVector s;
    s.n_ = n_sites;
    s.rep_ = Representation::Full;
    if (amps.size() != (std::size_t(1) << n_sites)) throw DimensionError("amplitude count != 2^n");
    s.amps_ = std::move(amps);
    return s;
  }

  static StateVector collective(int n_sites, std::vector<complexd> amps) {
    StateVector s;
    s.n_ = n_sites;
    s.rep_ = Representation::CollectiveSpin;
    if (amps.size() != std::size_t(n_sites) + 1) throw DimensionError("sector dimension != N+1");
    s.amps_ = std::move(amps);
    return s;
  }

  static StateVector collective_zeros(int n_sites) {
    return collective(n_sites, std::vector<complexd>(std::size_t(n_sites) + 1));
  }

  int n_sites() const { return n_; }
  Representation rep() const { return rep_; }
  std::size_t dim() const { return amps_.size(); }

  complexd& operator[](std::size_t i) { return amps_[i]; }
  const complexd& operator[](std::size_t i) const { return amps_[i]; }

  std::vector<complexd>& amps() { return amps_; }
  const std::vector<complexd>& amps() const { return amps_; }

  double norm_sq() const {
    double s = 0.0;
    for (const auto& a : amps_) s += std::norm(a);
    return s;
  }

  double norm() const { return std::sqrt(norm_sq()); }

  StateVector& normalize() {
    double nn = norm();
    if (nn == 0.0) throw ArgumentError("cannot normalize the zero vector");
    for (auto& a : amps_) a /= nn;
    return *this;
  }

  StateVector normalized() const {
    StateVector s = *this;
    s.normalize();
    return s;
  }

  StateVector& scale(complexd c) {
    for (auto& a : amps_) a *= c;
    return *this;
  }

  // this += c * v
  StateVector& add_scaled(complexd c, const StateVector& v) {
    check_same_space(*this, v);
    for (std::size_t i = 0; i < amps_.size(); ++i) amps_[i] += c * v.amps_[i];
    return *this;
  }

  friend void check_same_space(const StateVector& a, const StateVector& b) {
    if (a.n_ != b.n_ || a.rep_ != b.rep_ || a.amps_.size() != b.amps_.size())
      throw DimensionError("state vectors live in different spaces");
  }

 private:
  int n_ = 0;
  Representation rep_ = Representation::Full;
  std::vector<complexd> amps_;
};

// <a|b>, conjugating the first argument
inline complexd inner(const StateVector& a, const StateVector& b) {
  check_same_space(a, b);
  complexd s(0.0, 0.0);
  for (std::size_t i = 0; i < a.dim(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

inline double distance(const StateVector& a, const StateVector& b) {
  check_same_space(a, b);
  double s = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) s += std::norm(a[i] - b[i]);
  return std::sqrt(s);
}

// p|psi> by bit flips and sign rules; no matrix is materialized.
inline StateVector apply_pauli(const PauliString& p, const StateVector& psi) {
  if (psi.rep() != Representation::Full)
    throw RepresentationError("apply_pauli requires the full representation");
  if (p.n_sites() != psi.n_sites()) throw DimensionError("pauli/state size mismatch");
  StateVector out = StateVector::zeros(psi.n_sites());
  const std::uint64_t x = p.xmask(), z = p.zmask();
  const complexd ph = PauliString::ipow(p.phase_exponent());
  const std::size_t dim = psi.dim();
  for (std::size_t idx = 0; idx < dim; ++idx) {
    complexd a = psi[idx];
    if ((std::popcount(z & idx) & 1) != 0) a = -a;
    out[idx ^ x] = ph * a;
  }
  return out;
}

// out += coeff * p|psi>
inline void accumulate_pauli(StateVector& out, complexd coeff, const PauliString& p,
                             const StateVector& psi) {
  if (psi.rep() != Representation::Full)
    throw RepresentationError("apply_pauli requires the full representation");
  if (p.n_sites() != psi.n_sites()) throw DimensionError("pauli/state size mismatch");
  check_same_space(out, psi);
  const std::uint64_t x = p.xmask(), z = p.zmask();
  const complexd c = coeff * PauliString::ipow(p.phase_exponent());
  const std::size_t dim = psi.dim();
  for (std::size_t idx = 0; idx < dim; ++idx) {
    complexd a = psi[idx];
    if ((std::popcount(z & idx) & 1) != 0) a = -a;
    out[idx ^ x] += c * a;
  }
}

}  // namespace revlab
