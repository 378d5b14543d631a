#include <doctest.h>

#include "oracles.hpp"
#include "revlab/fluctuation.hpp"
#include "revlab/models.hpp"

using namespace revlab;

namespace {

double binom(int n, int k) {
  double v = 1.0;
  for (int i = 0; i < k; ++i) v = v * (n - i) / (i + 1);
  return v;
}

Eigen::Matrix2cd random_hermitian_unit(CounterRng& rng) {
  Eigen::Matrix2cd m;
  complexd off(rng.normal(), rng.normal());
  m << rng.normal(), off, std::conj(off), rng.normal();
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(m, Eigen::EigenvaluesOnly);
  return m / (es.eigenvalues().cwiseAbs().maxCoeff() + 1e-9);
}

std::vector<Eigen::Vector2cd> plus_sites(int n) {
  const double r = 1.0 / std::sqrt(2.0);
  return std::vector<Eigen::Vector2cd>(n, Eigen::Vector2cd(r, r));
}

}  // namespace

TEST_CASE("additive_measure on closed-form states") {
  const int n = 5;
  auto zsum = additive_pauli_sum(n, 'z');

  // |0...0>: point mass at n
  auto m0 = additive_measure(zsum, StateVector::basis_state(n, 0));
  REQUIRE(m0.points.size() == 1);
  CHECK(m0.points[0].first == doctest::Approx(double(n)));
  CHECK(m0.median == doctest::Approx(double(n)));
  CHECK(m0.variance == doctest::Approx(0.0).epsilon(1e-12));

  // |+>^n: binomial over n - 2k, variance n
  auto plus = make_product_state(plus_sites(n));
  auto mp = additive_measure(zsum, plus);
  REQUIRE(mp.points.size() == std::size_t(n) + 1);
  for (int k = 0; k <= n; ++k) {
    CHECK(mp.points[k].first == doctest::Approx(-double(n) + 2 * k).epsilon(1e-10));
    CHECK(mp.points[k].second ==
          doctest::Approx(binom(n, k) / std::pow(2.0, n)).epsilon(1e-10));
  }
  CHECK(mp.variance == doctest::Approx(double(n)).epsilon(1e-9));
  CHECK(mp.total == doctest::Approx(1.0).epsilon(1e-9));

  // GHZ: half mass at +n, half at -n, variance n^2
  auto mg = additive_measure(zsum, make_ghz(n));
  REQUIRE(mg.points.size() == 2);
  CHECK(mg.points[0].first == doctest::Approx(-double(n)));
  CHECK(mg.points[1].first == doctest::Approx(double(n)));
  CHECK(mg.variance == doctest::Approx(double(n * n)).epsilon(1e-10));
}

TEST_CASE("additive_measure matches direct operator moments") {
  CounterRng rng(81, 0);
  for (int trial = 0; trial < 8; ++trial) {
    const int n = 5;
    std::vector<int> sites{0, 1, 2, 4};
    std::vector<Eigen::Matrix2cd> ops;
    for (std::size_t k = 0; k < sites.size(); ++k) ops.push_back(random_hermitian_unit(rng));
    auto A = make_additive(sites, ops);
    auto psi = oracles::random_state(n, rng);
    auto m = additive_measure(A, psi);
    CHECK(m.total == doctest::Approx(1.0).epsilon(1e-9));

    auto op = to_local_operator(A, n);
    StateVector w = op.apply(psi);
    const double mean = inner(psi, w).real();
    const double var = w.norm_sq() - mean * mean;
    CHECK(m.mean == doctest::Approx(mean).epsilon(1e-8));
    CHECK(m.variance == doctest::Approx(var).epsilon(1e-8));

    // median obeys both defining inequalities
    double below = 0.0, above = 0.0;
    for (const auto& [v, p] : m.points) {
      if (v <= m.median + 1e-12) below += p;
      if (v >= m.median - 1e-12) above += p;
    }
    CHECK(below >= 0.5 - 1e-9);
    CHECK(above >= 0.5 - 1e-9);
  }
}

TEST_CASE("norm certification is enforced") {
  Eigen::Matrix2cd big;
  big << 2.0, 0.0, 0.0, -2.0;
  CHECK_THROWS_AS(make_additive({0}, {big}), ArgumentError);
  Eigen::Matrix2cd nonherm;
  nonherm << 0.0, 1.0, 0.0, 0.0;
  CHECK_THROWS_AS(make_additive({0}, {nonherm}), ArgumentError);
}

TEST_CASE("tail_norm endpoints and projector oracle") {
  auto ghz = make_ghz(6);
  auto zsum = additive_pauli_sum(6, 'z');
  auto m = additive_measure(zsum, ghz);
  CHECK(tail_norm(m, -100.0, TailSide::GreaterEq) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(tail_norm(m, 1e-9, TailSide::GreaterEq) ==
        doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-10));

  // dense projector oracle on a random instance
  CounterRng rng(82, 0);
  std::vector<int> sites{0, 1, 2, 3, 4, 5};
  std::vector<Eigen::Matrix2cd> ops;
  for (int k = 0; k < 6; ++k) ops.push_back(random_hermitian_unit(rng));
  auto A = make_additive(sites, ops);
  auto psi = oracles::random_state(6, rng);
  auto ma = additive_measure(A, psi);

  auto es = hermitian_eigensystem(oracles::kron_matrix(to_local_operator(A, 6)));
  Eigen::VectorXcd c = es.vectors.adjoint() * to_eigen(psi);
  const double x = ma.median + 0.37;
  double mass = 0.0;
  for (int k = 0; k < c.size(); ++k)
    if (es.values(k) >= x - 1e-12) mass += std::norm(c(k));
  CHECK(tail_norm(ma, x, TailSide::GreaterEq) == doctest::Approx(std::sqrt(mass)).epsilon(1e-8));
}

TEST_CASE("ground tail profile") {
  // all |0>: point mass, the curve above the mean is empty
  std::vector<Eigen::Vector2cd> zeros(8, Eigen::Vector2cd(1.0, 0.0));
  auto zspec = build_product_state_hamiltonian(zeros);
  auto zgs = ground_state(zspec);
  auto zprof = ground_tail_profile(zspec, zgs, additive_pauli_sum(8, 'z'));
  CHECK(zprof.point_mass);

  // gapped TFI: a positive fitted decay rate
  auto spec = build_transverse_ising(10, 1.0, 2.0, Boundary::Periodic);
  auto gs = ground_state(spec);
  auto prof = ground_tail_profile(spec, gs, additive_pauli_sum(10, 'z'));
  CHECK(prof.fit_points >= 2);
  CHECK(prof.fitted_rate > 0.0);
  CHECK(prof.comparison_rate == doctest::Approx(std::sqrt(gs.gap / 10.0)).epsilon(1e-12));
}

TEST_CASE("Hoeffding control: binomial tails of a free product state") {
  const int n = 12;
  auto plus = make_product_state(plus_sites(n));
  auto m = additive_measure(additive_pauli_sum(n, 'z'), plus);
  // binomial tail oracle: P(sum >= h) = sum_{k: n-2k >= h} C(n,k)/2^n
  for (double h : {2.0, 4.0, 6.0}) {
    double mass = 0.0;
    for (int k = 0; k <= n; ++k)
      if (n - 2 * k >= h - 1e-12) mass += binom(n, k) / std::pow(2.0, n);
    CHECK(tail_norm(m, h, TailSide::GreaterEq) == doctest::Approx(std::sqrt(mass)).epsilon(1e-10));
  }
}

TEST_CASE("gap-variance trade-off") {
  std::vector<Eigen::Vector2cd> sites = plus_sites(8);
  auto pspec = build_product_state_hamiltonian(sites);
  auto pgs = ground_state(pspec);
  auto t = gap_variance_tradeoff(pspec, pgs, additive_pauli_sum(8, 'z'));
  CHECK(t.deltaE == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(t.variance <= 8.0 + 1e-9);  // independent bounded sites

  // TFI sweep: the ratio stays bounded by one constant
  double worst = 0.0;
  for (double h : {1.5, 2.0, 4.0}) {
    auto spec = build_transverse_ising(10, 1.0, h, Boundary::Periodic);
    auto gs = ground_state(spec);
    auto r = gap_variance_tradeoff(spec, gs, additive_pauli_sum(10, 'z'));
    worst = std::max(worst, r.ratio);
  }
  CHECK(worst < 10.0);

  // LMG at criticality: the ratio stays finite as N grows
  auto lmg = build_lmg_sector(512, 1.0, 0.0, 1.0);
  auto lgs = ground_state(lmg);
  StateVector w = lmg_apply_sx(lgs.ground_states[0]);
  const double mean = inner(lgs.ground_states[0], w).real();
  const double var = 4.0 * (w.norm_sq() - mean * mean);
  const double ratio = lgs.gap * var / 512.0;
  CHECK(ratio > 0.0);
  CHECK(ratio < 10.0);
}

TEST_CASE("q-local operators cannot jump additive eigenvalues by more than 2q") {
  CounterRng rng(83, 0);
  for (int trial = 0; trial < 5; ++trial) {
    const int n = 5;
    std::vector<int> sites{0, 1, 2, 3, 4};
    std::vector<Eigen::Matrix2cd> ops;
    for (int k = 0; k < n; ++k) ops.push_back(random_hermitian_unit(rng));
    auto A = make_additive(sites, ops);
    auto psi = oracles::random_state(n, rng);
    auto m = additive_measure(A, psi);
    for (int q = 0; q <= 2; ++q) {
      const double h = 2.0 * q + 2.0 * rng.uniform(0.1, 1.0);  // q < h/2
      // exhaustive over the q-local Pauli basis; zero by linearity for any O
      double worst = 0.0;
      for_each_q_local(n, q, std::nullopt, nullptr, [&](const PauliString& p) {
        auto block = compressed_block_norm(A, LocalOperator::from_pauli(1.0, p), m.median,
                                           m.median + h);
        worst = std::max(worst, block);
        return true;
      });
      CHECK(worst <= 1e-10);
    }
  }
}

TEST_CASE("fisher information and N_eff") {
  // GHZ with A = sum Z: F = 4 n^2
  const int n = 6;
  auto ghz = make_ghz(n);
  auto zsum = additive_pauli_sum(n, 'z');
  auto rep = fisher_neff(ghz, &zsum, 4);
  CHECK(rep.fisher_given == doctest::Approx(4.0 * n * n).epsilon(1e-10));
  CHECK(rep.neff_given == doctest::Approx(double(n)).epsilon(1e-10));
  CHECK(rep.neff_lower <= rep.neff_upper + 1e-9);
  CHECK(rep.neff_upper >= double(n) - 1e-9);

  // product states have N_eff <= 1
  CounterRng rng(84, 0);
  std::vector<Eigen::Vector2cd> sites(n);
  for (auto& s : sites) {
    s << complexd(rng.normal(), rng.normal()), complexd(rng.normal(), rng.normal());
    s.normalize();
  }
  auto prod = fisher_neff(make_product_state(sites), nullptr, 4);
  CHECK(prod.neff_upper <= 1.0 + 1e-9);
  CHECK(prod.neff_lower <= prod.neff_upper + 1e-9);

  // the ascent recovers the GHZ optimum
  auto found = fisher_neff(make_ghz(8), nullptr, 16);
  CHECK(found.neff_lower >= 8.0 - 1e-6);
  CHECK(found.neff_lower <= found.neff_upper + 1e-9);
}

TEST_CASE("LMG gapped-phase scaling controls") {
  // off-critical lambda = h/2: the gap saturates (exponent ~ 0) and the
  // fluctuation is extensive (exponent ~ 1)
  std::vector<int> Ns{128, 256, 512, 1024};
  auto off = lmg_scaling_fit(Ns, 0.5, 0.0, 1.0);
  CHECK(std::abs(off.gap_fit.exponent) < 0.05);
  CHECK(off.variance_fit.exponent == doctest::Approx(1.0).epsilon(0.1));
}

TEST_CASE("critical exponent arithmetic") {
  // 1D transverse Ising: z = 1, eta = 1/4 -> p = 7/4, inequality satisfied
  CriticalExponents tfi{1.0, 0.25, 1.75, 1.0, 1.0};
  auto rep = critical_exponent_inequality(tfi);
  CHECK(rep.p == doctest::Approx(1.75).epsilon(1e-15));
  CHECK(rep.z_inequality_holds);
  CHECK(rep.rhs_from_eta == doctest::Approx(0.875).epsilon(1e-15));
  CHECK(rep.fisher_consistent);  // 2 - 1/4 = 1.75 / 1
  CHECK(!rep.saturated);

  // exact saturation flagged
  CriticalExponents sat{0.875, 0.25, 1.75, 1.0, 1.0};
  CHECK(critical_exponent_inequality(sat).saturated);

  // Fisher-inconsistent set flagged
  CriticalExponents bad{1.0, 0.25, 2.0, 1.0, 1.0};
  CHECK(!critical_exponent_inequality(bad).fisher_consistent);
}

TEST_CASE("full-system fluctuations stay extensive across sizes") {
  // (Delta A_L)^2 / N bounded by one constant over N in {8, 10, 12} for the
  // gapped TFI ground state with A = sum Z
  double worst = 0.0;
  for (int n : {8, 10, 12}) {
    auto spec = build_transverse_ising(n, 1.0, 2.0, Boundary::Periodic);
    auto gs = ground_state(spec, GroundOptions{.max_dense_sites = 10});
    auto m = additive_measure(additive_pauli_sum(n, 'z'), gs.ground_states[0]);
    worst = std::max(worst, m.variance / double(n));
  }
  CHECK(worst < 4.0);
}
