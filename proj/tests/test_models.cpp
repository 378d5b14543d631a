#include <doctest.h>

#include <map>

#include "oracles.hpp"
#include "revlab/models.hpp"
#include "revlab/spectral.hpp"

using namespace revlab;

namespace {

std::vector<double> dense_spectrum(const LocalOperator& o) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(oracles::kron_matrix(o),
                                                     Eigen::EigenvaluesOnly);
  return {es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size()};
}

bool all_terms_commute(const LocalOperator& o) {
  const auto& ts = o.terms();
  for (std::size_t i = 0; i < ts.size(); ++i)
    for (std::size_t j = i + 1; j < ts.size(); ++j)
      if (!ts[i].op.commutes_with(ts[j].op)) return false;
  return true;
}

// commutation at the granularity of support groups (a projector like
// (I - |psi><psi|)_i splits into same-site Pauli terms that only commute as a
// block)
bool support_groups_commute(const LocalOperator& o, double tol = 1e-12) {
  std::map<std::uint64_t, LocalOperator> groups;
  for (const auto& t : o.terms()) {
    auto [it, fresh] = groups.try_emplace(t.op.support_mask(), LocalOperator(o.n_sites()));
    it->second.add_term(t.coeff, t.op);
  }
  std::vector<LocalOperator> blocks;
  for (auto& [mask, block] : groups) {
    block.canonicalize();
    blocks.push_back(block);
  }
  for (std::size_t i = 0; i < blocks.size(); ++i)
    for (std::size_t j = i + 1; j < blocks.size(); ++j)
      if (!blocks[i].commutes_with(blocks[j], tol)) return false;
  return true;
}

std::vector<Eigen::Vector2cd> tilted_sites(int n, double theta0 = 0.3, double step = 0.1) {
  std::vector<Eigen::Vector2cd> s(n);
  for (int i = 0; i < n; ++i) {
    double th = theta0 + step * i;
    s[i] << std::cos(th), std::sin(th);
  }
  return s;
}

}  // namespace

TEST_CASE("transverse Ising: certification and tiny spectra") {
  CHECK_THROWS_AS(build_transverse_ising(1, 1.0, 1.0, Boundary::Open), ArgumentError);

  // n=2, J=1, h=0, open: single bond, spectrum {-1,-1,+1,+1}
  auto zz = build_transverse_ising(2, 1.0, 0.0, Boundary::Open);
  auto sp = dense_spectrum(zz.terms);
  CHECK(sp[0] == doctest::Approx(-1.0));
  CHECK(sp[1] == doctest::Approx(-1.0));
  CHECK(sp[2] == doctest::Approx(1.0));
  CHECK(sp[3] == doctest::Approx(1.0));

  // TFI n=2, open, J=1, h=0 shifted: {0, 0, 2, 2}
  auto shifted = full_spectrum(zz);
  CHECK(shifted[0] == doctest::Approx(0.0));
  CHECK(shifted[1] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(shifted[2] == doctest::Approx(2.0));
  CHECK(shifted[3] == doctest::Approx(2.0));

  auto tfi = build_transverse_ising(8, 1.0, 2.0, Boundary::Periodic);
  CHECK(tfi.k == 2);
  CHECK(tfi.g == doctest::Approx(4.0).epsilon(1e-12));  // 2|J| + |h|
  CHECK(tfi.terms.is_hermitian());
  CHECK(interaction_strength_g(tfi) == doctest::Approx(tfi.g).epsilon(1e-12));

  auto tfi4 = build_transverse_ising(4, 1.0, 1.0, Boundary::Periodic);
  CHECK(interaction_strength_g(tfi4) == doctest::Approx(3.0).epsilon(1e-12));

  auto gs = ground_state(tfi);
  CHECK(gs.degeneracy == 1);
  CHECK(gs.gap > 0.0);
}

TEST_CASE("graph states: stabilizer structure") {
  // 2-vertex path: stabilizers X0 Z1 and Z0 X1, spectrum {0,1,1,2}
  auto path2 = build_graph_state_hamiltonian(2, path_edges(2));
  auto sp = full_spectrum(path2);
  const double want[4] = {0.0, 1.0, 1.0, 2.0};
  REQUIRE(sp.size() == 4);
  for (int i = 0; i < 4; ++i) CHECK(sp[i] == doctest::Approx(want[i]).epsilon(1e-12));

  auto ring = build_graph_state_hamiltonian(8, ring_edges(8));
  CHECK(ring.k == 3);  // 1 + max degree
  CHECK(all_terms_commute(ring.terms));
  auto gs = ground_state(ring);
  CHECK(gs.degeneracy == 1);
  CHECK(gs.gap == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(std::abs(gs.energy_shift) < 1e-10);

  CHECK_THROWS_AS(build_graph_state_hamiltonian(3, {{0, 0}}), ArgumentError);
}

TEST_CASE("cluster chain: boundary variants and symmetry") {
  auto fixed = build_cluster_chain(6, ClusterBoundary::FixedIdentity);
  CHECK(fixed.spec.k == 3);
  CHECK(all_terms_commute(fixed.spec.terms));
  auto gs = ground_state(fixed.spec);
  CHECK(gs.degeneracy == 1);
  CHECK(gs.gap == doctest::Approx(1.0).epsilon(1e-10));

  auto open = build_cluster_chain(6, ClusterBoundary::OpenDegenerate);
  auto gso = ground_state(open.spec);
  CHECK(gso.degeneracy == 4);
  CHECK(gso.gap == doctest::Approx(1.0).epsilon(1e-10));

  // Z2 x Z2 generators commute with every term of the degenerate variant
  REQUIRE(open.symmetry.size() == 2);
  for (const auto& s : open.symmetry)
    for (const auto& t : open.spec.terms.terms()) CHECK(s.commutes_with(t.op));
  // ... and with H as an operator, to 1e-12
  for (const auto& s : open.symmetry) {
    auto sym = LocalOperator::from_pauli(1.0, s);
    CHECK(open.spec.terms.commutes_with(sym, 1e-12));
  }

  CHECK_THROWS_AS(build_cluster_chain(2, ClusterBoundary::FixedIdentity), ArgumentError);
}

TEST_CASE("toric code on the 2x2 torus") {
  auto tc = build_toric_code(2, 2, Topology::Torus);
  CHECK(tc.spec.n_sites == 8);
  CHECK(tc.spec.k == 4);
  CHECK(all_terms_commute(tc.spec.terms));
  CHECK(tc.spec.g == doctest::Approx(2.0).epsilon(1e-12));  // each edge: 2 stars + 2 plaquettes at 1/2

  auto gs = ground_state(tc.spec);
  CHECK(gs.degeneracy == 4);
  // on a torus the star/plaquette products are identities, so violations come
  // in pairs: the first excited level sits at 2
  CHECK(gs.gap == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(std::abs(gs.energy_shift) < 1e-10);

  // matrix-free ground space agrees with the dense ground space
  auto basis = toric_ground_space(tc);
  REQUIRE(basis.size() == 4);
  for (std::size_t i = 0; i < basis.size(); ++i) {
    StateVector r = apply_hamiltonian(tc.spec, basis[i]);
    CHECK(r.norm() < 1e-10);  // ground energy is exactly 0
    for (std::size_t j = 0; j < i; ++j) CHECK(std::abs(inner(basis[j], basis[i])) < 1e-10);
  }
}

TEST_CASE("toric logical loops") {
  auto tc = build_toric_code(2, 2, Topology::Torus);
  auto loop = toric_logical_loop(tc, 0);
  CHECK(loop.support_size() == 2);  // = Lx

  // [T_L, H] = 0 via the dense commutator oracle
  auto loop_op = LocalOperator::from_pauli(1.0, loop);
  Eigen::MatrixXcd mt = oracles::kron_matrix(loop_op), mh = oracles::kron_matrix(tc.spec.terms);
  CHECK((mt * mh - mh * mt).cwiseAbs().maxCoeff() < 1e-12);

  // T_L^2 = I
  auto sq = compose(loop, loop);
  CHECK(sq.identity_letters());
  CHECK(sq.phase() == complexd(1.0, 0.0));

  // rotating the T_L eigenbasis pairs ground states: Omega_2 = T_L Omega_1
  // with <Omega_1|Omega_2> = 0
  auto basis = toric_ground_space(tc);
  auto xlog = toric_logical_x(tc, 0);  // anticommutes with the direction-0 Z loop
  CHECK(!loop.commutes_with(xlog));
  StateVector u_plus = basis[0];
  StateVector u_minus = apply_pauli(xlog, basis[0]);
  StateVector omega1 = u_plus;
  omega1.add_scaled(1.0, u_minus).scale(1.0 / std::sqrt(2.0));
  StateVector omega2 = apply_pauli(loop, omega1);
  CHECK(std::abs(inner(omega1, omega2)) < 1e-12);
  CHECK(apply_hamiltonian(tc.spec, omega2).norm() < 1e-10);  // still a ground state
  CHECK(std::abs(inner(omega1, apply_pauli(loop, omega1))) < 1e-12);

  CHECK_THROWS_AS(toric_logical_loop(build_toric_code(2, 2, Topology::Planar), 0), ArgumentError);
}

TEST_CASE("planar patch has a unique ground state") {
  auto tc = build_toric_code(2, 2, Topology::Planar);
  CHECK(tc.spec.n_sites == 12);
  auto opts = GroundOptions{};
  opts.max_dense_sites = 8;  // force the iterative path
  auto gs = ground_state(tc.spec, opts);
  CHECK(gs.solver == "iterative");
  CHECK(gs.degeneracy == 1);
  CHECK(gs.gap == doctest::Approx(1.0).epsilon(1e-8));

  auto proj = toric_ground_space(tc);
  REQUIRE(proj.size() == 1);
  CHECK(std::abs(std::abs(inner(proj[0], gs.ground_states[0])) - 1.0) < 1e-8);
}

TEST_CASE("product-state Hamiltonian") {
  auto sites = tilted_sites(4);
  auto spec = build_product_state_hamiltonian(sites);
  CHECK(spec.k == 1);
  CHECK(support_groups_commute(spec.terms));
  auto gs = ground_state(spec);
  CHECK(gs.degeneracy == 1);
  CHECK(gs.gap == doctest::Approx(1.0).epsilon(1e-10));

  // the ground state is the product state itself
  auto psi = make_product_state(sites);
  CHECK(std::abs(std::abs(inner(psi, gs.ground_states[0])) - 1.0) < 1e-10);

  // all |0>: ground state |0...0>
  std::vector<Eigen::Vector2cd> zeros(4, Eigen::Vector2cd(1.0, 0.0));
  auto z = ground_state(build_product_state_hamiltonian(zeros));
  CHECK(std::abs(std::abs(z.ground_states[0][0]) - 1.0) < 1e-12);

  // random single-site states on n=6: unique ground state = tensor product
  CounterRng rng(32, 0);
  std::vector<Eigen::Vector2cd> rnd(6);
  for (auto& s : rnd) {
    s << complexd(rng.normal(), rng.normal()), complexd(rng.normal(), rng.normal());
    s.normalize();
  }
  auto gr = ground_state(build_product_state_hamiltonian(rnd));
  CHECK(gr.degeneracy == 1);
  CHECK(std::abs(std::abs(inner(make_product_state(rnd), gr.ground_states[0])) - 1.0) < 1e-10);

  std::vector<Eigen::Vector2cd> bad(2, Eigen::Vector2cd(1.0, 1.0));
  CHECK_THROWS_AS(build_product_state_hamiltonian(bad), ArgumentError);
}

TEST_CASE("special states") {
  auto bell = make_ghz(2);
  auto zz = LocalOperator::from_pauli(1.0, PauliString::parse("Z0 Z1", 2));
  auto z0 = LocalOperator::from_pauli(1.0, PauliString::parse("Z0", 2));
  CHECK(zz.expectation(bell).real() == doctest::Approx(1.0));
  CHECK(std::abs(z0.expectation(bell)) < 1e-15);

  auto w = make_w(3);
  for (std::uint64_t b : {1u, 2u, 4u})
    CHECK(std::abs(w[b] - complexd(1.0 / std::sqrt(3.0), 0.0)) < 1e-15);

  auto hybrid = make_ghz_w_hybrid(4);
  CHECK(hybrid.norm() == doctest::Approx(1.0).epsilon(1e-13));
  auto z0h = LocalOperator::from_pauli(1.0, PauliString::single(4, 0, PauliLetter::Z));
  CHECK(std::abs(z0h.expectation(hybrid)) < 1e-13);

  // <GHZ4 | 0000> = 1/sqrt(2)
  CHECK(std::abs(inner(make_ghz(4), StateVector::basis_state(4, 0)) - 1.0 / std::sqrt(2.0)) < 1e-15);
}

TEST_CASE("LMG sector agrees with full-space diagonalization") {
  for (int N : {4, 6, 8, 10}) {
    double lambda = 1.0, gamma = 0.5, h = 0.7;
    auto sector = build_lmg_sector(N, lambda, gamma, h);
    auto full = build_lmg_full(N, lambda, gamma, h);
    auto gsec = ground_state(sector);
    auto gfull = ground_state(full, GroundOptions{.max_dense_sites = 10});
    CHECK(gsec.energy_shift == doctest::Approx(gfull.energy_shift).epsilon(1e-9));
  }
  // N = 12 against the iterative full-space solver
  auto sector = build_lmg_sector(12, 1.0, 0.0, 1.0);
  auto full = build_lmg_full(12, 1.0, 0.0, 1.0);
  auto gsec = ground_state(sector);
  auto gfull = ground_state(full, GroundOptions{.max_dense_sites = 4});
  CHECK(gfull.solver == "iterative");
  CHECK(gsec.energy_shift == doctest::Approx(gfull.energy_shift).epsilon(1e-9));
}

TEST_CASE("LMG sector spectrum is contained in the full-space spectrum") {
  for (int N : {4, 6, 8}) {
    auto sector_sp = full_spectrum(build_lmg_sector(N, 0.9, 0.3, 0.4));
    auto full_sp = full_spectrum(build_lmg_full(N, 0.9, 0.3, 0.4));
    // both are shifted to E0 = 0; sector E0 must be the global E0 (max-spin
    // sector holds the ground state), so compare against the shifted list
    for (double e : sector_sp) {
      double best = 1e9;
      for (double f : full_sp) best = std::min(best, std::abs(f - e));
      CHECK(best < 1e-9);
    }
  }
}

TEST_CASE("free collective spin: lambda = 0 gives an equally spaced spectrum") {
  auto spec = build_lmg_sector(8, 0.0, 1.0, 0.6);
  auto sp = full_spectrum(spec);
  REQUIRE(sp.size() == 9);
  for (std::size_t i = 0; i + 1 < sp.size(); ++i)
    CHECK(sp[i + 1] - sp[i] == doctest::Approx(2.0 * 0.6).epsilon(1e-10));
}

TEST_CASE("LMG with N=1024 at the critical point is gapped but small") {
  auto spec = build_lmg_sector(1024, 1.0, 0.0, 1.0);
  auto gs = ground_state(spec);
  CHECK(gs.gap > 0.0);
  CHECK(gs.gap < 1.0);
  CHECK(gs.degeneracy == 1);
}

TEST_CASE("LMG closed-form g matches the Pauli-form computation") {
  auto spec = build_lmg_sector(10, 0.8, 0.4, 0.3);
  REQUIRE(spec.has_pauli_form());
  // force the closed form and compare
  HamiltonianSpec stripped = spec;
  stripped.terms = LocalOperator(spec.n_sites);
  CHECK(interaction_strength_g(stripped) == doctest::Approx(interaction_strength_g(spec)).epsilon(1e-12));
}

TEST_CASE("stabilizer spectra are integers after the shift") {
  auto graph = build_graph_state_hamiltonian(5, ring_edges(5));
  for (double e : full_spectrum(graph)) CHECK(std::abs(e - std::round(e)) < 1e-10);
  auto cluster = build_cluster_chain(5, ClusterBoundary::FixedIdentity);
  for (double e : full_spectrum(cluster.spec)) CHECK(std::abs(e - std::round(e)) < 1e-10);
}
