#pragma once

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "revlab/experiments.hpp"
#include "revlab/fluctuation.hpp"
#include "revlab/meanfield.hpp"
#include "revlab/models.hpp"
#include "revlab/reversibility.hpp"

namespace revlab {

enum class VerifyLevel { Quick, Full };

struct CheckLine {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = true;
  double seconds = 0.0;
  std::vector<CheckLine> lines;

  void add(const std::string& name_, bool ok, const std::string& detail_ = {}) {
    lines.push_back({name_, ok, detail_});
    pass = pass && ok;
  }
};

namespace verify_detail {

inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

struct MatrixCell {
  std::string label;
  HamiltonianSpec spec;
  GroundSolution ground;
  std::vector<DisturbanceSpec> dists;
};

inline LocalOperator zero_projector(int n, const std::vector<int>& sites) {
  LocalOperator p = LocalOperator::identity(n);
  for (int s : sites) {
    LocalOperator f = LocalOperator::identity(n, 0.5);
    f += 0.5 * LocalOperator::from_pauli(1.0, PauliString::single(n, s, PauliLetter::Z));
    p = p * f;
  }
  return p;
}

inline std::vector<Eigen::Vector2cd> tilted_sites(int n) {
  std::vector<Eigen::Vector2cd> s(n);
  for (int i = 0; i < n; ++i) s[i] << std::cos(0.3 + 0.1 * i), std::sin(0.3 + 0.1 * i);
  return s;
}

// the fixed model x disturbance matrix of the reverse criterion
inline std::vector<MatrixCell> reverse_matrix(bool include_n12) {
  std::vector<MatrixCell> cells;
  auto push = [&](std::string label, HamiltonianSpec spec, DisturbanceSpec pauli_dist) {
    MatrixCell cell{std::move(label), std::move(spec), {}, {}};
    cell.ground = ground_state(cell.spec);
    cell.dists.push_back(
        make_disturbance(zero_projector(cell.spec.n_sites, {0, 1, 2, 3}),
                         std::vector<int>{0, 1, 2, 3}, "projector4"));
    cell.dists.push_back(std::move(pauli_dist));
    cells.push_back(std::move(cell));
  };

  {
    auto spec = build_product_state_hamiltonian(tilted_sites(8));
    auto zzz = LocalOperator::from_pauli(1.0, PauliString::parse("Z0 Z1 Z2", 8));
    push("product_n8", std::move(spec), make_disturbance(zzz, std::nullopt, "pauli3"));
  }
  {
    auto spec = build_graph_state_hamiltonian(8, ring_edges(8));
    auto g0 = LocalOperator::from_pauli(1.0, PauliString::parse("X0 Z1 Z7", 8));
    push("graph_ring_n8", std::move(spec), make_disturbance(g0, std::nullopt, "pauli3"));
  }
  {
    auto spec = build_transverse_ising(10, 1.0, 2.0, Boundary::Periodic);
    auto xxx = LocalOperator::from_pauli(1.0, PauliString::parse("X0 X1 X2", 10));
    push("tfi_n10_h2", std::move(spec), make_disturbance(xxx, std::nullopt, "pauli3"));
  }
  if (include_n12) {
    auto spec = build_transverse_ising(12, 1.0, 1.5, Boundary::Periodic);
    auto xxx = LocalOperator::from_pauli(1.0, PauliString::parse("X0 X1 X2", 12));
    push("tfi_n12_h1.5", std::move(spec), make_disturbance(xxx, std::nullopt, "pauli3"));
  }
  return cells;
}

template <class Fn>
CriterionResult timed(int id, const std::string& name, double runtime_cap_s, Fn&& body) {
  CriterionResult res;
  res.id = id;
  res.name = name;
  const auto t0 = std::chrono::steady_clock::now();
  body(res);
  res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (runtime_cap_s > 0)
    res.add("runtime<" + std::to_string(int(runtime_cap_s)) + "s",
            res.seconds < runtime_cap_s, fmt(res.seconds) + " s");
  return res;
}

}  // namespace verify_detail

// 1. Reverse inequality over the model x disturbance x q matrix: zero violations.
inline CriterionResult criterion_reverse_matrix(VerifyLevel level) {
  using namespace verify_detail;
  return timed(1, "reverse-inequality-matrix", 300.0, [&](CriterionResult& res) {
    auto cells = reverse_matrix(level == VerifyLevel::Full);
    int violations = 0, count = 0;
    double worst = 1e300;
    for (const auto& cell : cells) {
      for (const auto& d : cell.dists) {
        for (int q : {2, 4, 6, 8}) {
          auto r = chebyshev_reverse(cell.spec, cell.ground, d, q);
          const double margin = r.rhs_bound - r.residual;
          worst = std::min(worst, margin);
          ++count;
          if (margin < 0) {
            ++violations;
            res.add(cell.label + ":" + d.label + ":q" + std::to_string(q), false,
                    "residual " + fmt(r.residual) + " > bound " + fmt(r.rhs_bound));
          }
        }
      }
    }
    res.add("reverse inequality, zero violations", violations == 0,
            std::to_string(count) + " cells, worst margin " + fmt(worst));
  });
}

// 2. Filter bounds over 50 random parameter tuples.
inline CriterionResult criterion_filter_bounds() {
  using namespace verify_detail;
  return timed(2, "filter-bounds", 10.0, [&](CriterionResult& res) {
    CounterRng rng(202403, 2);
    int bad_zero = 0, bad_sup = 0;
    double worst_zero = 0.0, worst_sup = 1e300;
    for (int t = 0; t < 50; ++t) {
      auto p = filter_params(int(rng.below(13)), 1 + int(rng.below(4)), rng.uniform(0.2, 4.0),
                             1 + int(rng.below(12)), rng.uniform(0.05, 2.0));
      auto rep = profile_filter(p, 10000);
      worst_zero = std::max(worst_zero, std::abs(rep.at_zero - 1.0));
      worst_sup = std::min(worst_sup, rep.cap - rep.sampled_sup);
      if (std::abs(rep.at_zero - 1.0) > 1e-10) ++bad_zero;
      if (!rep.in_band_bound_holds) ++bad_sup;
    }
    res.add("F_R(0)=1 within 1e-10", bad_zero == 0, "worst " + fmt(worst_zero));
    res.add("sup|F_R| <= 2exp(-2n0/xi) at 1e4 points", bad_sup == 0,
            "worst margin " + fmt(worst_sup));
  });
}

// 3. Chebyshev envelope bounds over n = 1..20.
inline CriterionResult criterion_cheby_bounds() {
  using namespace verify_detail;
  return timed(3, "chebyshev-bounds", 10.0, [&](CriterionResult& res) {
    int bad = 0;
    double worst = 1e300;
    for (int n = 1; n <= 20; ++n) {
      auto rep = verify_cheby_bounds(n, 10000);
      worst = std::min({worst, rep.margin_unit_interval, rep.margin_upper_outside,
                        rep.margin_lower_outside});
      if (!rep.holds) ++bad;
    }
    res.add("T_n envelope bounds, zero violations", bad == 0, "worst margin " + fmt(worst));
  });
}

// 4. Energy-tail inequality on the seeded 2-local ensemble.
inline CriterionResult criterion_energy_tail() {
  using namespace verify_detail;
  return timed(4, "energy-tail", 120.0, [&](CriterionResult& res) {
    const std::uint64_t seed = 20240311;
    int violations = 0;
    double worst = 1e300;
    for (int i = 0; i < 20; ++i) {
      auto spec = random_two_local(8, 12, seed, i);
      auto ground = ground_state(spec);
      auto rep = energy_tail_check(spec, ground, random_disturbance(8, seed, i));
      worst = std::min(worst, rep.worst_margin);
      if (!rep.holds) ++violations;
    }
    res.add("energy-tail bound, zero violations over 20 instances", violations == 0,
            "worst margin " + fmt(worst));
  });
}

// 5. GHZ non-LR certificate and least-squares dominance.
inline CriterionResult criterion_ghz_and_dominance(VerifyLevel level) {
  using namespace verify_detail;
  return timed(5, "ghz-certificate-and-dominance", 1800.0, [&](CriterionResult& res) {
    const double target = 1.0 / std::sqrt(2.0) - 1e-9;
    auto ghz = make_ghz(8);
    auto proj = zero_projector(8, {0, 1, 2, 3, 4, 5, 6, 7});
    StateVector phi = proj.apply(ghz);
    double worst = 1e300;
    bool ok = true;
    for (int q = 0; q <= 7; ++q) {
      auto r = optimal_local_reverse(ghz, phi, q);
      worst = std::min(worst, r.residual);
      ok = ok && r.residual >= target;
    }
    res.add("GHZ(8) optimal residual >= 1/sqrt(2)-1e-9 for q<=7", ok, "min " + fmt(worst));

    auto cells = reverse_matrix(level == VerifyLevel::Full);
    int cheby_cells = 0, violations = 0, full_basis_cells = 0;
    double worst_margin = 1e300;
    for (const auto& cell : cells) {
      const StateVector& omega = cell.ground.ground_states[0];
      for (const auto& d : cell.dists) {
        StateVector damaged = d.gamma.apply(omega);
        for (int q : {2, 4, 6, 8}) {
          auto cheb = chebyshev_reverse(cell.spec, cell.ground, d, q);
          ++cheby_cells;
          // the certified dominance chain: full q-local optimum (inside the
          // op's basis contract), else the degree-n0 polynomial span that
          // contains the realized Chebyshev candidate; the quick level keeps
          // only the small-basis cells on the full route
          double opt;
          const bool in_contract =
              q_local_basis_count(cell.spec.n_sites, q) <= 24000.0 ||
              (level == VerifyLevel::Full && cell.spec.n_sites <= 8);
          if (in_contract) {
            opt = optimal_local_reverse(omega, damaged, q).residual;
            ++full_basis_cells;
          } else {
            opt = polynomial_optimal_reverse(cell.spec, cell.ground, damaged, omega, cheb.params.n0)
                      .residual;
          }
          const double margin = cheb.residual - opt;
          worst_margin = std::min(worst_margin, margin);
          if (margin < -1e-8) ++violations;
        }
      }
    }
    res.add("dominance optimal <= chebyshev on all gapped cells", violations == 0,
            std::to_string(cheby_cells) + " cells (" + std::to_string(full_basis_cells) +
                " full-basis), worst margin " + fmt(worst_margin));
  });
}

// 6. LMG finite-size scaling at the critical coupling.
inline CriterionResult criterion_lmg_scaling() {
  using namespace verify_detail;
  return timed(6, "lmg-scaling", 600.0, [&](CriterionResult& res) {
    auto fit = lmg_scaling_fit({256, 512, 1024, 2048, 4096}, 1.0, 0.0, 1.0);
    res.add("gap exponent -1/3 +- 0.05", std::abs(fit.gap_fit.exponent + 1.0 / 3.0) <= 0.05,
            fmt(fit.gap_fit.exponent));
    res.add("(Delta M_x)^2 exponent 4/3 +- 0.05",
            std::abs(fit.variance_fit.exponent - 4.0 / 3.0) <= 0.05,
            fmt(fit.variance_fit.exponent));
  });
}

// 7. Critical-exponent arithmetic for the 1D transverse Ising inputs.
inline CriterionResult criterion_critical_exponents() {
  using namespace verify_detail;
  return timed(7, "critical-exponents", 0.0, [&](CriterionResult& res) {
    CriticalExponents tfi{1.0, 0.25, 1.75, 1.0, 1.0};
    auto rep = critical_exponent_inequality(tfi);
    res.add("p = 7/4 exactly", rep.p == 1.75, fmt(rep.p));
    res.add("z >= 1 - eta/2", rep.z_inequality_holds,
            fmt(rep.lhs_z) + " vs " + fmt(rep.rhs_from_eta));
    res.add("Fisher equality consistent", rep.fisher_consistent);
  });
}

// 8. Additive-compression structure: q-local operators cannot connect additive
// eigenspaces separated by more than 2q.
inline CriterionResult criterion_additive_compression() {
  using namespace verify_detail;
  return timed(8, "additive-compression", 120.0, [&](CriterionResult& res) {
    CounterRng rng(808, 0);
    const int n = 5;
    int violations = 0;
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
      std::vector<int> sites{0, 1, 2, 3, 4};
      std::vector<Eigen::Matrix2cd> ops;
      for (int k = 0; k < n; ++k) {
        Eigen::Matrix2cd m;
        complexd off(rng.normal(), rng.normal());
        m << rng.normal(), off, std::conj(off), rng.normal();
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(m, Eigen::EigenvaluesOnly);
        ops.push_back(m / (es.eigenvalues().cwiseAbs().maxCoeff() + 1e-9));
      }
      auto A = make_additive(sites, ops);
      StateVector psi = StateVector::zeros(n);
      for (std::size_t i = 0; i < psi.dim(); ++i) psi[i] = complexd(rng.normal(), rng.normal());
      psi.normalize();
      auto m = additive_measure(A, psi);
      const int q = int(rng.below(3));
      const double h = 2.0 * q + 2.0 * rng.uniform(0.05, 1.0);  // q < h/2
      for_each_q_local(n, q, std::nullopt, nullptr, [&](const PauliString& p) {
        const double block =
            compressed_block_norm(A, LocalOperator::from_pauli(1.0, p), m.median, m.median + h);
        worst = std::max(worst, block);
        if (block > 1e-10) ++violations;
        return true;
      });
    }
    res.add("compressed block vanishes for q < h/2 (100 trials)", violations == 0,
            "worst " + fmt(worst));
  });
}

// 9. Mean-field machinery: projector decomposition, hybrid scaling, product states.
inline CriterionResult criterion_meanfield() {
  using namespace verify_detail;
  return timed(9, "meanfield", 120.0, [&](CriterionResult& res) {
    CounterRng rng(909, 0);
    int violations = 0, violations_xyz = 0;
    double worst = 1e300;
    for (int t = 0; t < 50; ++t) {
      StateVector psi = StateVector::zeros(6);
      for (std::size_t i = 0; i < psi.dim(); ++i) psi[i] = complexd(rng.normal(), rng.normal());
      psi.normalize();
      int i = int(rng.below(6)), j = int(rng.below(6));
      if (i == j) j = (j + 1) % 6;
      auto rep = projector_decomposition_check(psi, i, j);
      worst = std::min(worst, rep.rhs - rep.lhs);
      if (!rep.holds) ++violations;
      if (!projector_decomposition_check(psi, i, j, ProjectorBasis::ZxyAxes).holds)
        ++violations_xyz;
    }
    // The fixed z/x projector set is blind to sigma_y-type correlations
    // (delta rho = eps sy (x) sz has lhs = eps against rhs = 0), so random
    // complex marginals violate it at a ~1% rate and this line cannot be
    // made to pass honestly; the axis-extended set restores the inequality.
    res.add("projector decomposition zero violations (50 marginals, fixed z/x set)",
            violations == 0,
            std::to_string(violations) + " violations, worst margin " + fmt(worst));
    res.add("projector decomposition with the y pair added (diagnostic)", violations_xyz == 0,
            std::to_string(violations_xyz) + " violations");

    std::vector<double> ls, sums;
    for (int l = 4; l <= 14; ++l) {
      auto psi = make_ghz_w_hybrid(l + 1);
      std::vector<int> L;
      for (int j = 1; j <= l; ++j) L.push_back(j);
      ls.push_back(double(l));
      sums.push_back(mf_deviation_sum(psi, 0, L).sum);
    }
    auto fit = fit_power_law(ls, sums);
    res.add("hybrid deviation-sum exponent 0.5 +- 0.1", std::abs(fit.exponent - 0.5) <= 0.1,
            fmt(fit.exponent));

    std::vector<Eigen::Vector2cd> sites(8);
    for (auto& v : sites) {
      v << complexd(rng.normal(), rng.normal()), complexd(rng.normal(), rng.normal());
      v.normalize();
    }
    auto dev = mf_deviation_sum(make_product_state(sites), 0, {1, 2, 3, 4, 5, 6, 7});
    res.add("product-state deviation sum < 1e-10", dev.sum < 1e-10, fmt(dev.sum));
  });
}

// 10. Macroscopicity contrast through the Fisher bracket.
inline CriterionResult criterion_macroscopicity(VerifyLevel level) {
  using namespace verify_detail;
  return timed(10, "macroscopicity-contrast", 300.0, [&](CriterionResult& res) {
    CounterRng rng(1010, 0);
    double worst_upper = 0.0;
    for (int t = 0; t < 5; ++t) {
      std::vector<Eigen::Vector2cd> sites(8);
      for (auto& v : sites) {
        v << complexd(rng.normal(), rng.normal()), complexd(rng.normal(), rng.normal());
        v.normalize();
      }
      worst_upper = std::max(worst_upper, fisher_neff(make_product_state(sites)).neff_upper);
    }
    res.add("product states: N_eff upper <= 1 + 1e-9", worst_upper <= 1.0 + 1e-9,
            fmt(worst_upper));

    auto ghz = fisher_neff(make_ghz(8));
    res.add("GHZ(8): ascent lower bound >= 8 - 1e-6", ghz.neff_lower >= 8.0 - 1e-6,
            fmt(ghz.neff_lower));

    if (level == VerifyLevel::Full) {
      auto spec = build_transverse_ising(12, 1.0, 1.5, Boundary::Periodic);
      auto gs = ground_state(spec, GroundOptions{.max_dense_sites = 8});
      auto rep = fisher_neff(gs.ground_states[0]);
      res.add("gapped TFI n=12: N_eff upper <= 3", rep.neff_upper <= 3.0, fmt(rep.neff_upper));
    }
  });
}

// 11. Toric code: degeneracies, indistinguishability, loop-restricted reverse.
inline CriterionResult criterion_toric(VerifyLevel level) {
  using namespace verify_detail;
  return timed(11, "toric-code", 300.0, [&](CriterionResult& res) {
    auto tc = build_toric_code(2, 2, Topology::Torus);
    auto gs = ground_state(tc.spec);
    res.add("2x2 torus ground degeneracy 4", gs.degeneracy == 4, std::to_string(gs.degeneracy));

    if (level == VerifyLevel::Full) {
      auto planar = build_toric_code(2, 2, Topology::Planar);
      auto pgs = ground_state(planar.spec, GroundOptions{.max_dense_sites = 8});
      res.add("planar patch ground degeneracy 1", pgs.degeneracy == 1,
              std::to_string(pgs.degeneracy));
    }

    auto basis = toric_ground_space(tc);
    auto topo = topo_indistinguishability_check(basis, 1);
    res.add("ground-space indistinguishability at support cutoff 1", topo.holds,
            "diag spread " + fmt(topo.max_diag_spread) + ", offdiag " + fmt(topo.max_offdiag));

    auto t_loop = toric_logical_loop(tc, 0);
    auto partner = toric_logical_x(tc, 0);
    StateVector omega1 = basis[0];
    omega1.add_scaled(1.0, apply_pauli(partner, basis[0])).scale(1.0 / std::sqrt(2.0));
    LocalOperator p_l = LocalOperator::identity(8, 0.5);
    p_l += complexd(-0.5) * LocalOperator::from_pauli(1.0, t_loop);
    OptimalOptions opts;
    opts.region = t_loop.support();
    double worst = 1e300;
    for (int q : {0, 1}) {
      auto rep = macroscopicity_witness_optimal(omega1, p_l, q, opts);
      worst = std::min(worst, rep.reverse.residual);
    }
    res.add("loop-restricted reverse residual >= 0.4 for q < 2", worst >= 0.4, fmt(worst));
  });
}

inline std::vector<CriterionResult> run_acceptance(VerifyLevel level) {
  std::vector<CriterionResult> out;
  out.push_back(criterion_reverse_matrix(level));
  out.push_back(criterion_filter_bounds());
  out.push_back(criterion_cheby_bounds());
  out.push_back(criterion_energy_tail());
  out.push_back(criterion_ghz_and_dominance(level));
  if (level == VerifyLevel::Full) out.push_back(criterion_lmg_scaling());
  out.push_back(criterion_critical_exponents());
  out.push_back(criterion_additive_compression());
  out.push_back(criterion_meanfield());
  out.push_back(criterion_macroscopicity(level));
  out.push_back(criterion_toric(level));
  return out;
}

inline int print_acceptance(const std::vector<CriterionResult>& results, std::FILE* stream) {
  int failures = 0;
  for (const auto& r : results) {
    std::fprintf(stream, "[%2d] %s %-32s (%.2f s)\n", r.id, r.pass ? "PASS" : "FAIL",
                 r.name.c_str(), r.seconds);
    for (const auto& line : r.lines) {
      std::fprintf(stream, "      %s %s%s%s\n", line.pass ? "ok  " : "FAIL", line.name.c_str(),
                   line.detail.empty() ? "" : ": ", line.detail.c_str());
    }
    if (!r.pass) ++failures;
  }
  std::fprintf(stream, "%s: %zu criteria, %d failed\n", failures == 0 ? "PASS" : "FAIL",
               results.size(), failures);
  return failures;
}

}  // namespace revlab
