#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "revlab/chebyshev.hpp"
#include "revlab/dense.hpp"
#include "revlab/local_operator.hpp"
#include "revlab/models.hpp"
#include "revlab/spectral.hpp"

namespace revlab {

inline constexpr double kOverlapFloor = 1e-8;

// A disturbance Gamma_L together with the region L it lives on and its norm
// (exact singular value when the support fits a dense restriction, triangle
// bound otherwise).
struct DisturbanceSpec {
  LocalOperator gamma;
  std::vector<int> region;
  double norm = 0.0;
  bool norm_exact = false;
  std::string label;
};

inline DisturbanceSpec make_disturbance(const LocalOperator& gamma,
                                        std::optional<std::vector<int>> region = std::nullopt,
                                        std::string label = {}) {
  DisturbanceSpec d;
  d.gamma = gamma;
  d.region = region.value_or(gamma.support());
  if (d.region.empty()) d.region = gamma.support();
  if (d.region.empty()) d.region = {0};
  // support must live inside L
  std::uint64_t lmask = 0;
  for (int s : d.region) lmask |= std::uint64_t(1) << s;
  if ((gamma.support_mask() & ~lmask) != 0) throw ArgumentError("Gamma support outside L");
  if (gamma.support().size() <= std::size_t(kExactNormSiteLimit)) {
    d.norm = operator_norm_exact(gamma);
    d.norm_exact = true;
  } else {
    d.norm = gamma.triangle_norm();
    d.norm_exact = false;
  }
  d.label = label.empty() ? ("gamma_L" + std::to_string(d.region.size())) : std::move(label);
  return d;
}

// RHS of the reverse inequality: 6 ||Gamma|| / |<Omega|Gamma|Omega>| e^{-2 n0 / xi}
inline double reverse_bound_rhs(const FilterParams& p, double norm_gamma, double overlap_abs,
                                double overlap_floor = kOverlapFloor) {
  if (!(overlap_abs > overlap_floor))
    throw VacuousBoundError("overlap below the floor: the bound carries no information");
  return 6.0 * norm_gamma / overlap_abs * p.suppression();
}

struct ReverseResult {
  int q = 0;
  int n0 = 0;
  double residual = 0.0;
  double rhs_bound = std::numeric_limits<double>::quiet_NaN();
  complexd overlap{0.0, 0.0};
  std::string method;
  FilterParams params;
  std::size_t basis_size = 0;  // optimal method: images processed
  std::size_t rank = 0;
  bool rank_saturated = false;
  std::optional<std::vector<complexd>> coefficients;
};

// The constructive reverse of the main inequality: R = F_R(H) / <Omega|Gamma|Omega>,
// applied matrix-free. The realized operator is a degree-n0 polynomial in H,
// hence (k n0 <= q)-local.
inline ReverseResult chebyshev_reverse(const HamiltonianSpec& spec, const GroundSolution& ground,
                                       const DisturbanceSpec& dist, int q,
                                       double overlap_floor = kOverlapFloor) {
  if (ground.degeneracy != 1)
    throw DegenerateGroundStateError("chebyshev_reverse needs a unique ground state");
  const StateVector& omega = ground.ground_states[0];
  StateVector phi = dist.gamma.apply(omega);
  const complexd overlap = inner(omega, phi);
  ReverseResult out;
  out.q = q;
  out.method = "chebyshev";
  out.overlap = overlap;
  out.params = filter_params(q, spec.k, spec.g, int(dist.region.size()), ground.gap);
  out.n0 = out.params.n0;
  out.rhs_bound = reverse_bound_rhs(out.params, dist.norm, std::abs(overlap), overlap_floor);
  StateVector reversed = apply_filter(out.params, spec, ground.energy_shift, phi);
  reversed.scale(1.0 / overlap);
  out.residual = distance(reversed, omega);
  return out;
}

struct OptimalOptions {
  std::optional<std::vector<int>> region;          // restrict basis supports to this set
  const std::vector<PauliString>* symmetry = nullptr;
  double gram_cutoff = 1e-10;                      // pseudo-inverse eigenvalue cutoff
  double rank_tol = 1e-8;                          // MGS new-direction threshold (relative)
  bool want_coefficients = false;
  std::size_t max_images = 8u << 20;               // enumeration cap
  std::size_t max_bytes = std::size_t(2) << 30;    // orthonormal basis memory cap
};

// Global least-squares minimum of || sum_P c_P P|input> - |target> || over the
// q-local Pauli basis. Solved by rank-revealing Gram-Schmidt over the image
// set (identical residual to the Gram pseudo-inverse route); stops early only
// when the images already span the whole space, where the minimum is 0. The
// min-norm coefficient vector is recovered from the frame operator
// sum_P P|input><input|P with the gram_cutoff pseudo-inverse when requested.
inline ReverseResult optimal_local_reverse(const StateVector& target, const StateVector& input,
                                           int q, const OptimalOptions& opts = {}) {
  check_same_space(target, input);
  if (target.rep() != Representation::Full)
    throw RepresentationError("optimal reverse needs the full representation");
  const int n = target.n_sites();
  const std::size_t dim = target.dim();
  const double input_norm = input.norm();

  ReverseResult out;
  out.q = q;
  out.n0 = q;
  out.method = "optimal_lsq";

  Eigen::MatrixXcd Q(dim, 64);
  Eigen::VectorXcd u(dim);
  const Eigen::VectorXcd t = to_eigen(target);
  const Eigen::VectorXcd in_vec = to_eigen(input);
  std::size_t rank = 0, images = 0;
  bool saturated = false;

  if (input_norm > 0.0) {
    for_each_q_local(n, q, opts.region, opts.symmetry, [&](const PauliString& p) {
      if (++images > opts.max_images)
        throw DimensionLimitError("q-local basis exceeds the image cap");
      // u = P |input> by mask rules, no temporary state
      const std::uint64_t xm = p.xmask(), zm = p.zmask();
      const complexd ph = PauliString::ipow(p.phase_exponent());
      for (std::size_t idx = 0; idx < dim; ++idx) {
        complexd a = in_vec(idx);
        if ((std::popcount(zm & idx) & 1) != 0) a = -a;
        u(idx ^ xm) = ph * a;
      }
      // Gram-Schmidt; a refinement pass only when cancellation was heavy yet
      // the remainder is still a candidate direction
      if (rank > 0) {
        u -= Q.leftCols(rank) * (Q.leftCols(rank).adjoint() * u).eval();
        const double after = u.norm();
        if (after < 0.5 * input_norm && after > 0.1 * opts.rank_tol * input_norm)
          u -= Q.leftCols(rank) * (Q.leftCols(rank).adjoint() * u).eval();
      }
      const double nn = u.norm();
      if (nn > opts.rank_tol * input_norm) {
        if ((rank + 1) * dim * sizeof(complexd) > opts.max_bytes)
          throw DimensionLimitError("orthonormal image basis exceeds the memory cap");
        if (Eigen::Index(rank) == Q.cols()) Q.conservativeResize(Eigen::NoChange, Q.cols() * 2);
        Q.col(rank) = u / nn;
        ++rank;
        if (rank == dim) {
          saturated = true;
          return false;  // the span is the whole space: the minimum is 0
        }
      }
      return true;
    });
  }
  out.basis_size = images;
  out.rank = rank;
  out.rank_saturated = saturated;
  // explicit residual vector; free of the cancellation a norm-squared
  // subtraction would suffer near zero
  Eigen::VectorXcd resid = t;
  if (rank > 0) resid -= Q.leftCols(rank) * (Q.leftCols(rank).adjoint() * t).eval();
  out.residual = resid.norm();

  if (opts.want_coefficients) {
    // frame operator M = sum_P (P phi)(P phi)^dagger shares its nonzero
    // spectrum with the Gram matrix; c = A^dagger M^+ target is the min-norm
    // least-squares solution.
    if (dim > 4096) throw DimensionLimitError("coefficient recovery capped at 2^12");
    Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(dim, dim);
    std::vector<PauliString> basis;
    for_each_q_local(n, q, opts.region, opts.symmetry, [&](const PauliString& p) {
      basis.push_back(p);
      Eigen::VectorXcd v = to_eigen(apply_pauli(p, input));
      M.noalias() += v * v.adjoint();
      return true;
    });
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(M);
    const double lmax = es.eigenvalues().cwiseAbs().maxCoeff();
    Eigen::VectorXcd y = Eigen::VectorXcd::Zero(dim);
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
      if (es.eigenvalues()(i) > opts.gram_cutoff * lmax && es.eigenvalues()(i) > 0.0) {
        y += es.eigenvectors().col(i) * (es.eigenvectors().col(i).dot(t) / es.eigenvalues()(i));
      }
    }
    std::vector<complexd> coeffs;
    coeffs.reserve(basis.size());
    for (const auto& p : basis) coeffs.push_back(to_eigen(apply_pauli(p, input)).dot(y));
    out.coefficients = std::move(coeffs);
  }
  return out;
}

// Least squares over the Krylov span {phi, H'phi, ..., H'^n0 phi} with
// H' = H - E0. The Chebyshev candidate's realized action lies in this span,
// so this residual certifiably sits between the full q-local optimum and the
// Chebyshev residual.
inline ReverseResult polynomial_optimal_reverse(const HamiltonianSpec& spec,
                                                const GroundSolution& ground,
                                                const StateVector& input,
                                                const StateVector& target, int n0) {
  check_same_space(target, input);
  const std::size_t dim = target.dim();
  Eigen::MatrixXcd Q(dim, n0 + 1);
  Eigen::VectorXcd t = to_eigen(target);
  StateVector cur = input;
  std::size_t rank = 0;
  const double scale = std::max(1.0, input.norm());
  for (int j = 0; j <= n0; ++j) {
    Eigen::VectorXcd u = to_eigen(cur);
    for (int pass = 0; pass < 2 && rank > 0; ++pass)
      u -= Q.leftCols(rank) * (Q.leftCols(rank).adjoint() * u).eval();
    const double nn = u.norm();
    if (nn > 1e-12 * scale) {
      Q.col(rank) = u / nn;
      ++rank;
    }
    if (j < n0) {
      StateVector next = apply_hamiltonian(spec, cur);
      next.add_scaled(-ground.energy_shift, cur);
      cur = std::move(next);
    }
  }
  ReverseResult out;
  out.q = n0 * spec.k;
  out.n0 = n0;
  out.method = "polynomial_lsq";
  out.rank = rank;
  out.basis_size = n0 + 1;
  Eigen::VectorXcd resid = t;
  if (rank > 0) resid -= Q.leftCols(rank) * (Q.leftCols(rank).adjoint() * t).eval();
  out.residual = resid.norm();
  return out;
}

struct TailCheckRow {
  double energy = 0.0;
  double tail = 0.0;
  double bound = 0.0;
  double margin = 0.0;  // bound - tail
};

struct TailCheckReport {
  std::vector<TailCheckRow> rows;
  double worst_margin = 0.0;
  bool holds = false;
};

// Energy-tail inequality: || Pi_{>=E} Gamma|Omega> ||^2 <=
// ||Gamma||^2 e^{-(E - 2 g |L|)/(4 g k)} at every spectral value E.
inline TailCheckReport energy_tail_check(const HamiltonianSpec& spec, const GroundSolution& ground,
                                         const DisturbanceSpec& dist) {
  const StateVector& omega = ground.ground_states[0];
  StateVector phi = dist.gamma.apply(omega);
  EnergyDistribution d = energy_distribution(spec, phi);
  const double lambda = 1.0 / (4.0 * spec.g * spec.k);
  const double offset = 2.0 * spec.g * double(dist.region.size());
  const double n2 = dist.norm * dist.norm;

  TailCheckReport rep;
  rep.worst_margin = std::numeric_limits<double>::infinity();
  // suffix sums from the top of the spectrum
  double tail = 0.0;
  std::vector<TailCheckRow> rows(d.entries.size());
  for (std::size_t i = d.entries.size(); i-- > 0;) {
    tail += d.entries[i].second;
    TailCheckRow row;
    row.energy = d.entries[i].first;
    row.tail = tail;
    row.bound = n2 * std::exp(-(row.energy - offset) * lambda);
    row.margin = row.bound - row.tail;
    rows[i] = row;
  }
  rep.rows = std::move(rows);
  for (const auto& r : rep.rows) rep.worst_margin = std::min(rep.worst_margin, r.margin);
  rep.holds = rep.worst_margin >= -1e-10 * std::max(1.0, n2);
  return rep;
}

struct WitnessReport {
  double alpha = 0.0;
  double beta = 0.0;
  double residual = 0.0;  // || O psi_a - psi_b ||
  double delta_sq = 0.0;  // residual^2 * |beta|, i.e. ||delta'||^2 / |beta|
  double bound = std::numeric_limits<double>::quiet_NaN();  // f / |alpha^2 beta|
  bool has_bound = false;
  bool within_bound = false;
  ReverseResult reverse;
};

namespace detail {

struct WitnessSplit {
  StateVector phi;  // P_L psi
  double alpha = 0.0, beta = 0.0;
};

inline WitnessSplit witness_split(const StateVector& psi, const LocalOperator& projector) {
  WitnessSplit s;
  s.phi = projector.apply(psi);
  StateVector twice = projector.apply(s.phi);
  if (distance(twice, s.phi) > 1e-10 * std::max(1.0, psi.norm()))
    throw NotAProjectorError("P_L is not idempotent on this state");
  s.alpha = s.phi.norm();
  StateVector rest = psi;
  rest.add_scaled(-1.0, s.phi);
  s.beta = rest.norm();
  if (s.alpha <= 1e-6 || s.beta <= 1e-6)
    throw DegenerateDecompositionError("witness decomposition has a vanishing branch");
  return s;
}

inline WitnessReport witness_from_reconstruction(const WitnessSplit& s, double reconstruction_err) {
  WitnessReport rep;
  rep.alpha = s.alpha;
  rep.beta = s.beta;
  // O psi_a - psi_b = (R phi - psi)/beta
  rep.residual = reconstruction_err / s.beta;
  rep.delta_sq = rep.residual * rep.residual * s.beta;
  return rep;
}

}  // namespace detail

// Macroscopicity witness through the constructive reverse: psi must be the
// unique gapped ground state of spec. Reports ||delta||^2 (scaled as
// ||delta'||^2 / |beta|) next to the bound f / |alpha^2 beta| with
// f = 6 e^{-2 n0 / xi}.
inline WitnessReport macroscopicity_witness_chebyshev(const HamiltonianSpec& spec,
                                                      const GroundSolution& ground,
                                                      const LocalOperator& projector,
                                                      const std::vector<int>& region, int q) {
  if (ground.degeneracy != 1)
    throw DegenerateGroundStateError("witness via the filter needs a unique ground state");
  const StateVector& psi = ground.ground_states[0];
  auto split = detail::witness_split(psi, projector);

  FilterParams params = filter_params(q, spec.k, spec.g, int(region.size()), ground.gap);
  const double overlap = split.alpha * split.alpha;  // <psi|P_L|psi>
  if (overlap <= kOverlapFloor) throw VacuousBoundError("projector overlap below the floor");
  StateVector reversed = apply_filter(params, spec, ground.energy_shift, split.phi);
  reversed.scale(1.0 / overlap);

  WitnessReport rep = detail::witness_from_reconstruction(split, distance(reversed, psi));
  rep.reverse.q = q;
  rep.reverse.n0 = params.n0;
  rep.reverse.method = "chebyshev";
  rep.reverse.params = params;
  rep.reverse.overlap = overlap;
  rep.reverse.residual = rep.residual;
  rep.bound = 6.0 * params.suppression() / (overlap * split.beta);
  rep.has_bound = true;
  rep.within_bound = rep.delta_sq <= rep.bound;
  return rep;
}

// Witness through the exhaustive least-squares reverse; works for any state
// (no Hamiltonian needed, so no bound is instantiated).
inline WitnessReport macroscopicity_witness_optimal(const StateVector& psi,
                                                    const LocalOperator& projector, int q,
                                                    const OptimalOptions& opts = {}) {
  auto split = detail::witness_split(psi, projector);
  ReverseResult ls = optimal_local_reverse(psi, split.phi, q, opts);
  WitnessReport rep = detail::witness_from_reconstruction(split, ls.residual);
  rep.reverse = std::move(ls);
  return rep;
}

struct TopoCheckRow {
  PauliString op;
  double diag_spread = 0.0;
  double max_offdiag = 0.0;
};

struct TopoReport {
  std::size_t checked = 0;
  std::size_t violations = 0;
  double max_diag_spread = 0.0;
  double max_offdiag = 0.0;
  bool holds = false;
  std::vector<TopoCheckRow> violating;
};

// Indistinguishability of degenerate ground states under few-body probes:
// equal diagonal expectations and vanishing off-diagonal elements for every
// (optionally symmetry-filtered) Pauli string with support <= cutoff.
inline TopoReport topo_indistinguishability_check(const std::vector<StateVector>& ground_states,
                                                  int support_cutoff,
                                                  const std::vector<PauliString>* symmetry = nullptr,
                                                  double tol = 1e-8) {
  if (ground_states.size() < 2) throw ArgumentError("need at least two ground states");
  const int n = ground_states[0].n_sites();
  TopoReport rep;
  for_each_q_local(n, support_cutoff, std::nullopt, symmetry, [&](const PauliString& p) {
    if (p.identity_letters()) return true;
    ++rep.checked;
    std::vector<complexd> diag;
    double offdiag = 0.0;
    std::vector<StateVector> images;
    for (const auto& g : ground_states) images.push_back(apply_pauli(p, g));
    for (std::size_t a = 0; a < ground_states.size(); ++a) {
      for (std::size_t b = 0; b < ground_states.size(); ++b) {
        complexd m = inner(ground_states[a], images[b]);
        if (a == b)
          diag.push_back(m);
        else
          offdiag = std::max(offdiag, std::abs(m));
      }
    }
    double spread = 0.0;
    for (std::size_t a = 0; a < diag.size(); ++a)
      for (std::size_t b = a + 1; b < diag.size(); ++b)
        spread = std::max(spread, std::abs(diag[a] - diag[b]));
    rep.max_diag_spread = std::max(rep.max_diag_spread, spread);
    rep.max_offdiag = std::max(rep.max_offdiag, offdiag);
    if (spread > tol || offdiag > tol) {
      ++rep.violations;
      if (rep.violating.size() < 16) rep.violating.push_back({p, spread, offdiag});
    }
    return true;
  });
  rep.holds = rep.violations == 0;
  return rep;
}

}  // namespace revlab
