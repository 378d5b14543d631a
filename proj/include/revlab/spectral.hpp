#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "revlab/dense.hpp"
#include "revlab/lanczos.hpp"
#include "revlab/models.hpp"
#include "revlab/tridiag.hpp"

namespace revlab {

// H|psi>, matrix-free: Pauli-term application in the full representation,
// banded multiply in the collective-spin sector.
inline StateVector apply_hamiltonian(const HamiltonianSpec& spec, const StateVector& psi) {
  if (psi.n_sites() != spec.n_sites) throw DimensionError("hamiltonian/state size mismatch");
  if (spec.rep == Representation::Full) {
    if (psi.rep() != Representation::Full) throw RepresentationError("spec is full-space");
    if (!spec.has_pauli_form()) throw RepresentationError("spec has no Pauli form");
    return spec.terms.apply(psi);
  }
  if (psi.rep() != Representation::CollectiveSpin)
    throw RepresentationError("spec is a collective-spin sector");
  const auto& d = spec.sector_diag;
  const auto& o = spec.sector_off2;
  const std::size_t dim = d.size();
  StateVector out = StateVector::collective_zeros(spec.n_sites);
  for (std::size_t j = 0; j < dim; ++j) {
    complexd v = d[j] * psi[j];
    if (j >= 2) v += o[j - 2] * psi[j - 2];
    if (j + 2 < dim) v += o[j] * psi[j + 2];
    out[j] = v;
  }
  return out;
}

// row-sum scale of the Hamiltonian, used for tolerance scaling
inline double hamiltonian_scale(const HamiltonianSpec& spec) {
  if (spec.has_pauli_form()) return spec.terms.triangle_norm();
  double s = 0.0;
  for (std::size_t j = 0; j < spec.sector_diag.size(); ++j) {
    double r = std::abs(spec.sector_diag[j]);
    if (j >= 2) r += std::abs(spec.sector_off2[j - 2]);
    if (j + 2 < spec.sector_diag.size()) r += std::abs(spec.sector_off2[j]);
    s = std::max(s, r);
  }
  return s;
}

struct GroundOptions {
  std::optional<double> degeneracy_tol;  // default 1e-8 * max(1, scale)
  int max_dense_sites = 10;
  int max_levels = 8;  // ground group plus the level above must fit
  LanczosOptions lanczos;
};

struct GroundSolution {
  double energy_shift = 0.0;  // original E0; shifted spectrum has E0 = 0
  std::vector<StateVector> ground_states;
  double gap = 0.0;  // E1 - E0 measured above the degenerate ground group
  int degeneracy = 1;
  std::string solver;
};

namespace detail {

inline void orthonormalize(std::vector<StateVector>& vs) {
  for (std::size_t i = 0; i < vs.size(); ++i) {
    for (int pass = 0; pass < 2; ++pass)
      for (std::size_t j = 0; j < i; ++j) vs[i].add_scaled(-inner(vs[j], vs[i]), vs[j]);
    vs[i].normalize();
  }
}

struct SectorChain {
  std::vector<double> diag, sub;
  std::vector<int> index_map;  // chain position -> sector index
};

inline std::array<SectorChain, 2> sector_parity_chains(const HamiltonianSpec& spec) {
  std::array<SectorChain, 2> chains;
  const int dim = int(spec.sector_diag.size());
  for (int parity = 0; parity < 2; ++parity) {
    auto& c = chains[parity];
    for (int j = parity; j < dim; j += 2) {
      c.diag.push_back(spec.sector_diag[j]);
      c.index_map.push_back(j);
      if (j + 2 < dim) c.sub.push_back(spec.sector_off2[j]);
    }
  }
  return chains;
}

}  // namespace detail

inline GroundSolution ground_state(const HamiltonianSpec& spec, const GroundOptions& opts = {}) {
  const double scale = hamiltonian_scale(spec);
  const double deg_tol = opts.degeneracy_tol.value_or(1e-8 * std::max(1.0, scale));
  GroundSolution out;

  if (spec.rep == Representation::CollectiveSpin) {
    auto chains = detail::sector_parity_chains(spec);
    // lowest few eigenvalues of each parity chain, merged
    struct Lev {
      double value;
      int parity;
      int k;
    };
    std::vector<Lev> levels;
    const int want = opts.max_levels + 1;
    for (int parity = 0; parity < 2; ++parity) {
      if (chains[parity].diag.empty()) continue;
      auto vals = tridiag_lowest_eigenvalues(chains[parity].diag, chains[parity].sub, want);
      for (int k = 0; k < int(vals.size()); ++k) levels.push_back({vals[k], parity, k});
    }
    std::sort(levels.begin(), levels.end(), [](const Lev& a, const Lev& b) { return a.value < b.value; });
    const double e0 = levels[0].value;
    std::size_t group = 1;
    while (group < levels.size() && levels[group].value - e0 <= deg_tol) ++group;
    if (group >= levels.size()) throw NotConvergedError("gap level not bracketed; raise max_levels");
    out.energy_shift = e0;
    out.degeneracy = int(group);
    out.gap = levels[group].value - e0;
    for (std::size_t i = 0; i < group; ++i) {
      const auto& c = chains[levels[i].parity];
      auto y = tridiag_eigenvector(c.diag, c.sub, levels[i].value, opts.lanczos.seed);
      StateVector v = StateVector::collective_zeros(spec.n_sites);
      for (std::size_t p = 0; p < y.size(); ++p) v[c.index_map[p]] = y[p];
      out.ground_states.push_back(std::move(v));
    }
    detail::orthonormalize(out.ground_states);
    out.solver = "banded";
  } else if (spec.n_sites <= opts.max_dense_sites) {
    if (spec.n_sites > kDenseSiteLimit) throw DimensionLimitError("dense solver beyond site limit");
    auto es = hermitian_eigensystem(to_dense(spec.terms));
    const double e0 = es.values(0);
    const std::size_t dim = spec.dim();
    std::size_t group = 1;
    while (group < dim && es.values(group) - e0 <= deg_tol) ++group;
    if (group >= dim) throw GaplessError("entire spectrum is degenerate");
    out.energy_shift = e0;
    out.degeneracy = int(group);
    out.gap = es.values(group) - e0;
    for (std::size_t i = 0; i < group; ++i)
      out.ground_states.push_back(from_eigen(spec.n_sites, es.vectors.col(i)));
    out.solver = "dense";
  } else {
    const std::size_t dim = spec.dim();
    LanczosOptions lopts = opts.lanczos;
    lopts.tol = std::min(lopts.tol, 1e-10) * std::max(1.0, scale);
    auto apply = [&](const std::vector<complexd>& in, std::vector<complexd>& result) {
      StateVector tmp = StateVector::from_amplitudes(spec.n_sites, in);
      result = spec.terms.apply(tmp).amps();
    };
    std::vector<std::vector<complexd>> found;
    found.reserve(opts.max_levels + 1);  // deflate holds pointers into it
    std::vector<double> values;
    std::vector<const std::vector<complexd>*> deflate;
    double e0 = 0.0;
    bool have_gap = false;
    for (int level = 0; level <= opts.max_levels; ++level) {
      lopts.seed = opts.lanczos.seed + level;
      auto eig = lanczos_lowest(dim, apply, deflate, lopts);
      if (!eig.converged) throw NotConvergedError("Lanczos stagnated");
      if (level == 0) e0 = eig.value;
      if (eig.value - e0 <= deg_tol) {
        found.push_back(std::move(eig.vector));
        values.push_back(eig.value);
        deflate.push_back(&found.back());
      } else {
        out.gap = eig.value - e0;
        have_gap = true;
        break;
      }
    }
    if (!have_gap) throw NotConvergedError("gap level not bracketed; raise max_levels");
    out.energy_shift = e0;
    out.degeneracy = int(found.size());
    for (auto& v : found)
      out.ground_states.push_back(StateVector::from_amplitudes(spec.n_sites, std::move(v)));
    detail::orthonormalize(out.ground_states);
    out.solver = "iterative";
  }

  // residual certificate
  for (const auto& v : out.ground_states) {
    StateVector r = apply_hamiltonian(spec, v);
    r.add_scaled(-out.energy_shift, v);
    if (r.norm() > 1e-8 * std::max(1.0, scale))
      throw NotConvergedError("ground-state residual above certificate");
  }
  return out;
}

// all eigenvalues, shifted so the minimum is 0
inline std::vector<double> full_spectrum(const HamiltonianSpec& spec) {
  std::vector<double> vals;
  if (spec.rep == Representation::CollectiveSpin) {
    auto chains = detail::sector_parity_chains(spec);
    for (const auto& c : chains) {
      if (c.diag.empty()) continue;
      Eigen::SelfAdjointEigenSolver<MatrixXcd> es;
      Eigen::Map<const VectorXd> d(c.diag.data(), c.diag.size());
      Eigen::Map<const VectorXd> e(c.sub.data(), c.sub.size());
      es.computeFromTridiagonal(d, e, Eigen::EigenvaluesOnly);
      for (int i = 0; i < es.eigenvalues().size(); ++i) vals.push_back(es.eigenvalues()(i));
    }
  } else {
    if (spec.n_sites > kDenseSiteLimit) throw DimensionLimitError("full spectrum needs a dense solve");
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(to_dense(spec.terms), Eigen::EigenvaluesOnly);
    vals.assign(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  }
  std::sort(vals.begin(), vals.end());
  const double e0 = vals.front();
  for (double& v : vals) v -= e0;
  return vals;
}

// weights |<E_k|phi>|^2 against shifted energies; eigenvalues within 1e-9 of
// each other share a bin (stabilizer spectra are exactly degenerate).
struct EnergyDistribution {
  std::vector<std::pair<double, double>> entries;  // (energy >= 0, weight), ascending

  double total_weight() const {
    double s = 0.0;
    for (const auto& e : entries) s += e.second;
    return s;
  }
};

inline constexpr double kEnergyBinTol = 1e-9;

inline EnergyDistribution energy_distribution(const HamiltonianSpec& spec, const StateVector& phi) {
  if (spec.rep != Representation::Full)
    throw RepresentationError("energy_distribution needs the full representation");
  if (spec.n_sites > kDenseSiteLimit)
    throw DimensionLimitError("energy_distribution needs the full eigenbasis");
  auto es = hermitian_eigensystem(to_dense(spec.terms));
  VectorXcd c = es.vectors.adjoint() * to_eigen(phi);
  EnergyDistribution out;
  const double e0 = es.values(0);
  for (int k = 0; k < c.size(); ++k) {
    const double e = es.values(k) - e0;
    const double w = std::norm(c(k));
    if (!out.entries.empty() && e - out.entries.back().first <= kEnergyBinTol)
      out.entries.back().second += w;
    else
      out.entries.emplace_back(e, w);
  }
  return out;
}

// || Pi^H_{>= E} phi ||^2 from a distribution; non-increasing in E.
inline double tail_weight(const EnergyDistribution& dist, double e) {
  double s = 0.0;
  for (const auto& [energy, weight] : dist.entries)
    if (energy >= e - 1e-12) s += weight;
  return s;
}

}  // namespace revlab
