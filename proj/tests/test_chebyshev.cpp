#include <doctest.h>

#include "oracles.hpp"
#include "revlab/chebyshev.hpp"
#include "revlab/models.hpp"
#include "revlab/spectral.hpp"

using namespace revlab;

namespace {

// independent oracle: three-term recurrence T_{k+1} = 2 x T_k - T_{k-1}
double cheby_recurrence(int n, double x) {
  double tm = 1.0, t = x;
  if (n == 0) return tm;
  for (int k = 1; k < n; ++k) {
    double tn = 2.0 * x * t - tm;
    tm = t;
    t = tn;
  }
  return t;
}

}  // namespace

TEST_CASE("chebyshev_T values") {
  for (int n = 0; n <= 25; ++n) CHECK(chebyshev_T(n, 1.0) == doctest::Approx(1.0).epsilon(1e-12));

  // T_2(x) = 2x^2 - 1 at x = 0.3
  CHECK(chebyshev_T(2, 0.3) == doctest::Approx(-0.82).epsilon(1e-14));

  // T_7(2.5) against the recurrence oracle, 1e-10 relative
  CHECK(chebyshev_T(7, 2.5) ==
        doctest::Approx(cheby_recurrence(7, 2.5)).epsilon(1e-10));

  CounterRng rng(51, 0);
  for (int t = 0; t < 200; ++t) {
    int n = int(rng.below(16));
    double x = rng.uniform(-3.0, 3.0);
    CHECK(chebyshev_T(n, x) == doctest::Approx(cheby_recurrence(n, x)).epsilon(1e-9));
  }

  // parity: T_n(-x) = (-1)^n T_n(x)
  CHECK(chebyshev_T(5, -1.7) == doctest::Approx(-chebyshev_T(5, 1.7)).epsilon(1e-12));
  CHECK(chebyshev_T(6, -1.7) == doctest::Approx(chebyshev_T(6, 1.7)).epsilon(1e-12));
}

TEST_CASE("log_abs_chebyshev_T is consistent") {
  for (double x : {1.0001, 1.5, 3.0, 20.0}) {
    for (int n : {1, 3, 10}) {
      CHECK(log_abs_chebyshev_T(n, x) ==
            doctest::Approx(std::log(std::abs(chebyshev_T(n, x)))).epsilon(1e-10));
    }
  }
  // stays finite where the direct value overflows
  CHECK(std::isfinite(log_abs_chebyshev_T(400, 50.0)));
}

TEST_CASE("Chebyshev envelope bounds hold") {
  // n=5 on [-1,1]: the sampled max is exactly 1 (endpoints are extremal)
  auto r5 = verify_cheby_bounds(5, 10001);
  CHECK(std::abs(r5.margin_unit_interval) < 1e-12);
  CHECK(r5.holds);

  // frozen n=3, x=2 case: T_3(2) = 26, upper (2|x|)^3/2 = 32,
  // lower exp(6 sqrt(1/3))/2 = 15.96...
  CHECK(chebyshev_T(3, 2.0) == doctest::Approx(26.0).epsilon(1e-13));
  CHECK(26.0 <= 32.0);
  const double lower = std::exp(6.0 * std::sqrt(1.0 / 3.0)) / 2.0;
  CHECK(lower == doctest::Approx(15.97394).epsilon(1e-5));
  CHECK(26.0 >= lower);

  for (int n = 1; n <= 20; ++n) CHECK(verify_cheby_bounds(n, 2000).holds);
}

TEST_CASE("filter parameter arithmetic") {
  // q=4, k=2 -> n0 = 2
  auto p = filter_params(4, 2, 1.0, 4, 1.0);
  CHECK(p.n0 == 2);
  // E_c = g|L| + 8 g k n0 = 4 + 32 = 36, xi = sqrt(73)
  CHECK(p.Ec == doctest::Approx(36.0).epsilon(1e-14));
  CHECK(p.xi == doctest::Approx(std::sqrt(73.0)).epsilon(1e-14));
  CHECK(p.lambda == doctest::Approx(1.0 / 8.0).epsilon(1e-14));
  CHECK(!p.degenerate);

  // invariants recompute from the stored fields
  CHECK(p.Ec == doctest::Approx(p.g * p.L_size + 8.0 * p.g * p.k * p.n0).epsilon(1e-12));
  CHECK(p.xi == doctest::Approx(std::sqrt(1.0 + 2.0 * p.Ec / p.deltaE)).epsilon(1e-12));
  CHECK(p.xi > 1.0);
  CHECK(p.lambda > 0.0);

  // q < k: constant filter, flagged
  auto d = filter_params(1, 3, 1.0, 2, 0.5);
  CHECK(d.n0 == 0);
  CHECK(d.degenerate);

  CHECK_THROWS_AS(filter_params(4, 2, 1.0, 4, 0.0), GaplessError);
  CHECK_THROWS_AS(filter_params(4, 2, 1.0, 4, -1.0), GaplessError);
  CHECK_THROWS_AS(filter_params(-1, 2, 1.0, 4, 1.0), ArgumentError);
}

TEST_CASE("filter profile: F_R(0) = 1 and the in-band cap") {
  CounterRng rng(52, 0);
  for (int t = 0; t < 25; ++t) {
    auto p = filter_params(int(rng.below(13)), 1 + int(rng.below(4)),
                           rng.uniform(0.2, 4.0), 1 + int(rng.below(12)),
                           rng.uniform(0.05, 2.0));
    CHECK(eval_filter(p, 0.0) == 1.0);  // exact: identical numerator and denominator
    auto rep = profile_filter(p, 2000);
    CHECK(rep.at_zero == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(rep.in_band_bound_holds);
    CHECK(rep.sampled_sup <= rep.cap);
  }
}

TEST_CASE("filter beyond the band obeys the growth bound") {
  auto p = filter_params(6, 2, 1.5, 4, 0.8);
  const double edge = 2.0 * p.Ec + p.deltaE;
  for (double s : {1.0, 3.0, 10.0, 40.0}) {
    const double x = edge + s;
    const double bound =
        std::pow((2.0 * x - 2.0 * p.deltaE) / p.Ec - 2.0, p.n0) * p.suppression();
    CHECK(std::abs(eval_filter(p, x)) <= bound * (1.0 + 1e-12));
  }
}

TEST_CASE("apply_filter: degenerate order returns the input") {
  auto spec = build_transverse_ising(4, 1.0, 2.0, Boundary::Periodic);
  auto gs = ground_state(spec);
  CounterRng rng(53, 0);
  auto psi = oracles::random_state(4, rng);
  auto p = filter_params(1, 2, spec.g, 2, gs.gap);
  REQUIRE(p.n0 == 0);
  CHECK(distance(apply_filter(p, spec, gs.energy_shift, psi), psi) == 0.0);
}

TEST_CASE("apply_filter acts as F_R(E) on eigenvectors") {
  auto spec = build_transverse_ising(6, 1.0, 2.0, Boundary::Periodic);
  auto gs = ground_state(spec);
  auto es = hermitian_eigensystem(oracles::kron_matrix(spec.terms));
  auto p = filter_params(8, spec.k, spec.g, 3, gs.gap);
  REQUIRE(p.n0 == 4);
  for (int k : {0, 1, 7, 20, 63}) {
    auto v = from_eigen(6, es.vectors.col(k));
    auto out = apply_filter(p, spec, gs.energy_shift, v);
    const double fe = eval_filter(p, es.values(k) - es.values(0));
    StateVector want = v;
    want.scale(fe);
    CHECK(distance(out, want) <= 1e-9 * std::max(1.0, std::abs(fe)));
  }
}

TEST_CASE("apply_filter matches the spectral-decomposition oracle on TFI n=8") {
  auto spec = build_transverse_ising(8, 1.0, 2.0, Boundary::Periodic);
  auto gs = ground_state(spec);
  auto es = hermitian_eigensystem(oracles::kron_matrix(spec.terms));
  auto p = filter_params(6, spec.k, spec.g, 4, gs.gap);
  CounterRng rng(54, 0);
  auto psi = oracles::random_state(8, rng);

  Eigen::VectorXcd c = es.vectors.adjoint() * to_eigen(psi);
  Eigen::VectorXcd want = Eigen::VectorXcd::Zero(c.size());
  for (int k = 0; k < c.size(); ++k)
    want += eval_filter(p, es.values(k) - es.values(0)) * c(k) * es.vectors.col(k);

  auto out = apply_filter(p, spec, gs.energy_shift, psi);
  CHECK((want - to_eigen(out)).norm() < 1e-8);
}

TEST_CASE("apply_filter is linear and commutes with H") {
  auto spec = build_transverse_ising(6, 1.0, 1.5, Boundary::Periodic);
  auto gs = ground_state(spec);
  auto p = filter_params(6, spec.k, spec.g, 3, gs.gap);
  CounterRng rng(55, 0);
  auto a = oracles::random_state(6, rng);
  auto b = oracles::random_state(6, rng);
  complexd ca(0.3, 0.4), cb(-0.9, 0.1);

  StateVector lin = StateVector(a);
  lin.scale(ca).add_scaled(cb, b);
  auto lhs = apply_filter(p, spec, gs.energy_shift, lin);
  auto rhs = apply_filter(p, spec, gs.energy_shift, a).scale(ca);
  rhs.add_scaled(cb, apply_filter(p, spec, gs.energy_shift, b));
  CHECK(distance(lhs, rhs) < 1e-10);

  auto fh = apply_filter(p, spec, gs.energy_shift, apply_hamiltonian(spec, a));
  auto hf = apply_hamiltonian(spec, apply_filter(p, spec, gs.energy_shift, a));
  CHECK(distance(fh, hf) <= 1e-8);
}

TEST_CASE("apply_filter overflow guard") {
  auto spec = build_transverse_ising(4, 1.0, 2.0, Boundary::Periodic);
  FilterParams p;
  p.n0 = 60;
  p.k = 1;
  p.q = 60;
  p.g = 1.0;
  p.L_size = 1;
  p.deltaE = 1e-4;
  p.Ec = 1e-4;  // band far too narrow for this spectrum
  p.xi = std::sqrt(1.0 + 2.0 * p.Ec / p.deltaE);
  p.lambda = 0.25;
  CounterRng rng(56, 0);
  auto psi = oracles::random_state(4, rng);
  CHECK_THROWS_AS(apply_filter(p, spec, 0.0, psi), RangeError);
}

TEST_CASE("high-range product check") {
  auto p = filter_params(6, 2, 1.0, 4, 0.7);
  const double edge = 2.0 * p.Ec + p.deltaE;
  std::vector<double> grid;
  for (int i = 0; i < 10; ++i) grid.push_back(edge + i * 0.8 * p.Ec);
  auto rep = high_range_product_check(p, grid);
  CHECK(rep.holds_2gL);
  CHECK(rep.holds_6gL);
  CHECK(rep.g_at_band_edge ==
        doctest::Approx(-2.0 * p.n0 - p.lambda * p.deltaE / 2.0 + p.n0 * std::log(2.0))
            .epsilon(1e-12));
  CHECK(rep.g_at_band_edge < 0.0);

  // n0 = 0: only the 2g|L| offset survives (pure e-factor comparison)
  auto p0 = filter_params(1, 2, 1.0, 4, 0.7);
  std::vector<double> grid0{2.0 * p0.Ec + p0.deltaE, 2.0 * p0.Ec + p0.deltaE + 5.0};
  CHECK(high_range_product_check(p0, grid0).holds_2gL);
}

TEST_CASE("mutated E_c (dropping 8 g k n0) breaks the high-range inequality") {
  auto p = filter_params(5, 1, 1.0, 1, 0.1);
  FilterParams bad = p;
  bad.Ec = bad.g * bad.L_size;  // drop the 8 g k n0 piece
  bad.xi = std::sqrt(1.0 + 2.0 * bad.Ec / bad.deltaE);
  const double edge = 2.0 * bad.Ec + bad.deltaE;
  std::vector<double> grid;
  for (int i = 0; i <= 50; ++i) grid.push_back(edge + i * 1.0);
  auto rep = high_range_product_check(bad, grid);
  CHECK(!rep.holds_2gL);  // the report names which inequality broke
  auto good = high_range_product_check(p, [&] {
    std::vector<double> g2;
    const double e2 = 2.0 * p.Ec + p.deltaE;
    for (int i = 0; i <= 50; ++i) g2.push_back(e2 + i * 1.0);
    return g2;
  }());
  CHECK(good.holds_2gL);
}

TEST_CASE("high-range margins on a TFI n=10 instance") {
  auto spec = build_transverse_ising(10, 1.0, 2.0, Boundary::Periodic);
  auto gs = ground_state(spec);
  auto p = filter_params(8, spec.k, spec.g, 4, gs.gap);
  const double edge = 2.0 * p.Ec + p.deltaE;
  std::vector<double> grid;
  for (int i = 0; i < 10; ++i) grid.push_back(edge + i * 0.5 * p.Ec);
  auto rep = high_range_product_check(p, grid);
  REQUIRE(rep.points.size() == 10);
  CHECK(rep.holds_2gL);
  CHECK(rep.holds_6gL);  // the stronger 6g|L| offset
  for (const auto& pt : rep.points) CHECK(pt.margin_6gL <= pt.margin_2gL);
}
