#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <json.hpp>
#include <string>
#include <utility>
#include <vector>

#include "revlab/dense.hpp"
#include "revlab/local_operator.hpp"
#include "revlab/pauli.hpp"
#include "revlab/state.hpp"

namespace revlab {

using json = nlohmann::json;

// k-local Hamiltonian with certified interaction strength: k is the largest
// term support, g bounds the summed |coeff| of terms touching any one site.
// Collective-spin specs additionally carry the (N+1)-dimensional maximal-spin
// sector as a banded matrix in the S_z eigenbasis (couplings only at
// |dm| = 2, so the band is two decoupled tridiagonal parity chains).
struct HamiltonianSpec {
  std::string model;
  json params;
  int n_sites = 0;
  Representation rep = Representation::Full;
  LocalOperator terms;  // Pauli form; may be empty for large collective specs
  int k = 0;
  double g = 0.0;
  std::vector<double> sector_diag;
  std::vector<double> sector_off2;  // couples index j and j+2

  std::size_t dim() const {
    return rep == Representation::Full ? (std::size_t(1) << n_sites)
                                       : std::size_t(n_sites) + 1;
  }
  bool has_pauli_form() const { return !terms.empty(); }
};

// max over sites i of sum over terms touching i of |coeff| (exact norm of a
// single Pauli term); identity terms touch no site. Large collective-spin
// specs use the closed-form per-site sum of the defining Pauli form.
inline double interaction_strength_g(const HamiltonianSpec& spec) {
  if (spec.has_pauli_form()) {
    std::vector<double> per_site(spec.n_sites, 0.0);
    for (const auto& t : spec.terms.terms()) {
      double a = std::abs(t.coeff);
      std::uint64_t m = t.op.support_mask();
      while (m) {
        per_site[std::countr_zero(m)] += a;
        m &= m - 1;
      }
    }
    double g = 0.0;
    for (double v : per_site) g = std::max(g, v);
    return g;
  }
  if (spec.model == "lmg") {
    const double lambda = spec.params.at("lambda").get<double>();
    const double gamma = spec.params.at("gamma").get<double>();
    const double h = spec.params.at("h").get<double>();
    const double N = spec.n_sites;
    return (N - 1.0) / N * std::abs(lambda) * (1.0 + std::abs(gamma)) + std::abs(h);
  }
  throw RepresentationError("no Pauli form available to certify g");
}

inline int max_term_support(const LocalOperator& o) { return o.locality_q(); }

namespace detail {

inline void certify(HamiltonianSpec& spec) {
  if (spec.has_pauli_form()) {
    spec.k = spec.terms.locality_q();
    spec.g = interaction_strength_g(spec);
    if (!spec.terms.is_hermitian()) throw ArgumentError("hamiltonian is not hermitian");
  }
}

}  // namespace detail

enum class Boundary { Open, Periodic };

// H = -J sum Z_i Z_{i+1} - h sum X_i
inline HamiltonianSpec build_transverse_ising(int n, double J, double h, Boundary boundary) {
  if (n < 2) throw ArgumentError("transverse Ising needs n >= 2");
  HamiltonianSpec spec;
  spec.model = "transverse_ising";
  spec.params = {{"J", J}, {"h", h}, {"boundary", boundary == Boundary::Open ? "open" : "periodic"}};
  spec.n_sites = n;
  LocalOperator H(n);
  const int bonds = boundary == Boundary::Periodic ? n : n - 1;
  for (int i = 0; i < bonds; ++i) {
    PauliString zz(n);
    zz.set_letter(i, PauliLetter::Z);
    zz.set_letter((i + 1) % n, PauliLetter::Z);
    H.add_term(-J, zz);
  }
  for (int i = 0; i < n; ++i) H.add_term(-h, PauliString::single(n, i, PauliLetter::X));
  H.canonicalize();
  spec.terms = std::move(H);
  detail::certify(spec);
  return spec;
}

// Graph-state Hamiltonian sum_i (I - g_i)/2 with g_i = X_i prod_{j ~ i} Z_j.
// Commuting stabilizers, ground energy 0, gap exactly 1.
inline HamiltonianSpec build_graph_state_hamiltonian(int n,
                                                     const std::vector<std::pair<int, int>>& edges) {
  if (n < 1) throw ArgumentError("graph needs at least one vertex");
  std::vector<std::vector<int>> adj(n);
  std::vector<std::vector<bool>> seen(n, std::vector<bool>(n, false));
  for (auto [a, b] : edges) {
    if (a < 0 || b < 0 || a >= n || b >= n) throw ArgumentError("edge endpoint out of range");
    if (a == b) throw ArgumentError("self-loops are not allowed");
    if (seen[a][b]) throw ArgumentError("duplicate edge");
    seen[a][b] = seen[b][a] = true;
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  HamiltonianSpec spec;
  spec.model = "graph_state";
  spec.params = {{"n", n}, {"edges", edges}};
  spec.n_sites = n;
  LocalOperator H(n);
  for (int i = 0; i < n; ++i) {
    PauliString gi = PauliString::single(n, i, PauliLetter::X);
    for (int j : adj[i]) gi.set_letter(j, PauliLetter::Z);
    H.add_term(0.5, PauliString::identity(n));
    H.add_term(-0.5, gi);
  }
  H.canonicalize();
  spec.terms = std::move(H);
  detail::certify(spec);
  return spec;
}

inline std::vector<std::pair<int, int>> ring_edges(int n) {
  std::vector<std::pair<int, int>> e;
  for (int i = 0; i < n; ++i) e.emplace_back(i, (i + 1) % n);
  return e;
}

inline std::vector<std::pair<int, int>> path_edges(int n) {
  std::vector<std::pair<int, int>> e;
  for (int i = 0; i + 1 < n; ++i) e.emplace_back(i, i + 1);
  return e;
}

enum class ClusterBoundary { FixedIdentity, OpenDegenerate };

struct ClusterChain {
  HamiltonianSpec spec;
  std::vector<PauliString> stabilizers;
  // Z2 x Z2 generators: products of Z on the even / odd sublattice. They
  // commute with every bulk stabilizer; the weight-2 boundary stabilizers of
  // the fixed_identity variant each break one of them.
  std::vector<PauliString> symmetry;
};

// H_C = sum_i (I - K_i)/2 with K_i = X_{i-1} Z_i X_{i+1}; boundary operators
// replaced by the identity (fixed_identity keeps the two weight-2 boundary
// stabilizers, open_degenerate drops them, leaving a 4-fold ground space).
inline ClusterChain build_cluster_chain(int n, ClusterBoundary boundary) {
  if (n < 3) throw ArgumentError("cluster chain needs n >= 3");
  ClusterChain out;
  HamiltonianSpec& spec = out.spec;
  spec.model = "cluster_chain";
  spec.params = {{"n", n},
                 {"boundary", boundary == ClusterBoundary::FixedIdentity ? "fixed_identity"
                                                                         : "open_degenerate"}};
  spec.n_sites = n;
  const int lo = boundary == ClusterBoundary::FixedIdentity ? 0 : 1;
  const int hi = boundary == ClusterBoundary::FixedIdentity ? n - 1 : n - 2;
  LocalOperator H(n);
  for (int i = lo; i <= hi; ++i) {
    PauliString K(n);
    if (i - 1 >= 0) K.set_letter(i - 1, PauliLetter::X);
    K.set_letter(i, PauliLetter::Z);
    if (i + 1 < n) K.set_letter(i + 1, PauliLetter::X);
    out.stabilizers.push_back(K);
    H.add_term(0.5, PauliString::identity(n));
    H.add_term(-0.5, K);
  }
  H.canonicalize();
  spec.terms = std::move(H);
  detail::certify(spec);
  for (int parity = 0; parity < 2; ++parity) {
    PauliString s(n);
    for (int i = parity; i < n; i += 2) s.set_letter(i, PauliLetter::Z);
    out.symmetry.push_back(s);
  }
  return out;
}

enum class Topology { Torus, Planar };

// Qubits on lattice edges; stars are X on the edges at a vertex, plaquettes Z
// around a face. Torus: 2 Lx Ly qubits, 4-fold degenerate ground space.
// Planar patch (smooth boundary, truncated stars): unique ground state.
struct ToricCode {
  HamiltonianSpec spec;
  int Lx = 0, Ly = 0;
  Topology topology = Topology::Torus;
  std::vector<PauliString> stars, plaquettes;
};

inline ToricCode build_toric_code(int Lx, int Ly, Topology topology) {
  if (Lx < 2 || Ly < 2) throw ArgumentError("toric code needs Lx, Ly >= 2");
  ToricCode out;
  out.Lx = Lx;
  out.Ly = Ly;
  out.topology = topology;
  HamiltonianSpec& spec = out.spec;
  spec.model = "toric_code";
  spec.params = {{"Lx", Lx}, {"Ly", Ly}, {"topology", topology == Topology::Torus ? "torus" : "planar"}};

  int n = 0;
  if (topology == Topology::Torus) {
    n = 2 * Lx * Ly;
    if (n > 24) throw DimensionLimitError("toric lattice too large");
    spec.n_sites = n;
    auto h_edge = [&](int i, int j) { return ((j % Ly + Ly) % Ly) * Lx + ((i % Lx + Lx) % Lx); };
    auto v_edge = [&](int i, int j) {
      return Lx * Ly + ((j % Ly + Ly) % Ly) * Lx + ((i % Lx + Lx) % Lx);
    };
    for (int j = 0; j < Ly; ++j)
      for (int i = 0; i < Lx; ++i) {
        PauliString star(n);
        star.set_letter(h_edge(i, j), PauliLetter::X);
        star.set_letter(h_edge(i - 1, j), PauliLetter::X);
        star.set_letter(v_edge(i, j), PauliLetter::X);
        star.set_letter(v_edge(i, j - 1), PauliLetter::X);
        out.stars.push_back(star);
        PauliString plaq(n);
        plaq.set_letter(h_edge(i, j), PauliLetter::Z);
        plaq.set_letter(h_edge(i, j + 1), PauliLetter::Z);
        plaq.set_letter(v_edge(i, j), PauliLetter::Z);
        plaq.set_letter(v_edge(i + 1, j), PauliLetter::Z);
        out.plaquettes.push_back(plaq);
      }
  } else {
    // Lx x Ly faces, smooth boundary everywhere
    const int nh = Lx * (Ly + 1), nv = (Lx + 1) * Ly;
    n = nh + nv;
    if (n > 24) throw DimensionLimitError("toric lattice too large");
    spec.n_sites = n;
    auto h_edge = [&](int i, int j) { return j * Lx + i; };
    auto v_edge = [&](int i, int j) { return nh + j * (Lx + 1) + i; };
    for (int j = 0; j <= Ly; ++j)
      for (int i = 0; i <= Lx; ++i) {
        PauliString star(n);
        if (i > 0) star.set_letter(h_edge(i - 1, j), PauliLetter::X);
        if (i < Lx) star.set_letter(h_edge(i, j), PauliLetter::X);
        if (j > 0) star.set_letter(v_edge(i, j - 1), PauliLetter::X);
        if (j < Ly) star.set_letter(v_edge(i, j), PauliLetter::X);
        out.stars.push_back(star);
      }
    for (int j = 0; j < Ly; ++j)
      for (int i = 0; i < Lx; ++i) {
        PauliString plaq(n);
        plaq.set_letter(h_edge(i, j), PauliLetter::Z);
        plaq.set_letter(h_edge(i, j + 1), PauliLetter::Z);
        plaq.set_letter(v_edge(i, j), PauliLetter::Z);
        plaq.set_letter(v_edge(i + 1, j), PauliLetter::Z);
        out.plaquettes.push_back(plaq);
      }
  }
  LocalOperator H(n);
  for (const auto& s : out.stars) {
    H.add_term(0.5, PauliString::identity(n));
    H.add_term(-0.5, s);
  }
  for (const auto& p : out.plaquettes) {
    H.add_term(0.5, PauliString::identity(n));
    H.add_term(-0.5, p);
  }
  H.canonicalize();
  spec.terms = std::move(H);
  detail::certify(spec);
  return out;
}

// Non-contractible Z loop: direction 0 runs along x (support Lx, horizontal
// edges of row 0), direction 1 along y (support Ly). Commutes with H and is
// not a stabilizer-group element, so it moves between torus ground states.
inline PauliString toric_logical_loop(const ToricCode& tc, int direction) {
  if (tc.topology != Topology::Torus)
    throw ArgumentError("planar patch has no logical loop");
  const int n = tc.spec.n_sites;
  PauliString loop(n);
  if (direction == 0) {
    for (int i = 0; i < tc.Lx; ++i) loop.set_letter(i, PauliLetter::Z);  // h(i, 0)
  } else if (direction == 1) {
    for (int j = 0; j < tc.Ly; ++j)
      loop.set_letter(tc.Lx * tc.Ly + j * tc.Lx, PauliLetter::Z);  // v(0, j)
  } else {
    throw ArgumentError("direction must be 0 or 1");
  }
  return loop;
}

// X logical conjugate to toric_logical_loop(direction): shares exactly one
// edge with it, commutes with H.
inline PauliString toric_logical_x(const ToricCode& tc, int direction) {
  if (tc.topology != Topology::Torus)
    throw ArgumentError("planar patch has no logical loop");
  const int n = tc.spec.n_sites;
  PauliString loop(n);
  if (direction == 0) {
    for (int j = 0; j < tc.Ly; ++j) loop.set_letter(j * tc.Lx, PauliLetter::X);  // h(0, j)
  } else if (direction == 1) {
    for (int i = 0; i < tc.Lx; ++i) loop.set_letter(tc.Lx * tc.Ly + i, PauliLetter::X);  // v(i, 0)
  } else {
    throw ArgumentError("direction must be 0 or 1");
  }
  return loop;
}

// Ground space built matrix-free: project |0...0> with prod_s (I + A_s)/2 and
// translate with the X logicals; avoids diagonalizing 2^(2 Lx Ly).
inline std::vector<StateVector> toric_ground_space(const ToricCode& tc) {
  StateVector s0 = StateVector::basis_state(tc.spec.n_sites, 0);
  for (const auto& star : tc.stars) {
    StateVector flipped = apply_pauli(star, s0);
    s0.add_scaled(1.0, flipped).scale(0.5);
  }
  s0.normalize();
  if (tc.topology == Topology::Planar) return {s0};
  auto x0 = toric_logical_x(tc, 0), x1 = toric_logical_x(tc, 1);
  std::vector<StateVector> basis{s0, apply_pauli(x0, s0), apply_pauli(x1, s0),
                                 apply_pauli(x0, apply_pauli(x1, s0))};
  return basis;
}

// Maximal-spin sector of the Lipkin-Meshkov-Glick model
//   H = -(lambda/N) sum_{i<j} (sx sx + gamma sy sy) + h sum_i sz
// in the S_z eigenbasis (banded, |dm| in {0, 2}); uses
// sum_{i<j} sx sx = 2 Sx^2 - N/2. The Pauli form is materialized for small N
// so the sector can be checked against the full 2^N oracle.
inline HamiltonianSpec build_lmg_sector(int N, double lambda, double gamma, double h) {
  if (N < 2) throw ArgumentError("LMG needs N >= 2");
  if (std::abs(gamma) > 1.0) throw ArgumentError("LMG anisotropy requires |gamma| <= 1");
  if (N > 65535) throw DimensionLimitError("LMG sector limited to N <= 65535");
  HamiltonianSpec spec;
  spec.model = "lmg";
  spec.params = {{"N", N}, {"lambda", lambda}, {"gamma", gamma}, {"h", h}};
  spec.n_sites = N;
  spec.rep = Representation::CollectiveSpin;

  const double S = 0.5 * N;
  const int dim = N + 1;
  spec.sector_diag.assign(dim, 0.0);
  spec.sector_off2.assign(dim > 2 ? dim - 2 : 0, 0.0);
  const double cpl = -2.0 * lambda / N;  // coefficient of (Sx^2 + gamma Sy^2)
  const double shift = lambda * (1.0 + gamma) / 2.0;
  auto ap = [&](double m) { return std::sqrt((S * (S + 1) - m * (m + 1))); };  // <m+1|S+|m>
  for (int j = 0; j < dim; ++j) {
    const double m = -S + j;
    spec.sector_diag[j] = cpl * (1.0 + gamma) / 4.0 * 2.0 * (S * (S + 1) - m * m) +
                          shift + 2.0 * h * m;
    if (j + 2 < dim) {
      // <m+2| Sx^2 + gamma Sy^2 |m> = (1-gamma)/4 <m+2|S+^2|m>
      spec.sector_off2[j] = cpl * (1.0 - gamma) / 4.0 * ap(m) * ap(m + 1);
    }
  }

  if (N <= 14) {
    LocalOperator H(N);
    for (int i = 0; i < N; ++i)
      for (int j = i + 1; j < N; ++j) {
        PauliString xx(N), yy(N);
        xx.set_letter(i, PauliLetter::X);
        xx.set_letter(j, PauliLetter::X);
        yy.set_letter(i, PauliLetter::Y);
        yy.set_letter(j, PauliLetter::Y);
        H.add_term(-lambda / N, xx);
        H.add_term(-lambda * gamma / N, yy);
      }
    for (int i = 0; i < N; ++i) H.add_term(h, PauliString::single(N, i, PauliLetter::Z));
    H.canonicalize();
    spec.terms = std::move(H);
    spec.k = spec.terms.locality_q();
  } else {
    spec.k = lambda != 0.0 ? 2 : 1;
  }
  spec.g = interaction_strength_g(spec);
  return spec;
}

// Same Hamiltonian as a 2^N operator (oracle scale only).
inline HamiltonianSpec build_lmg_full(int N, double lambda, double gamma, double h) {
  if (N > 14) throw DimensionLimitError("full-space LMG limited to N <= 14");
  HamiltonianSpec spec = build_lmg_sector(N, lambda, gamma, h);
  spec.rep = Representation::Full;
  spec.sector_diag.clear();
  spec.sector_off2.clear();
  return spec;
}

// Commuting projector Hamiltonian sum_i (I - |psi_i><psi_i|); gap exactly 1,
// unique ground state = the given product state.
inline HamiltonianSpec build_product_state_hamiltonian(const std::vector<Eigen::Vector2cd>& states) {
  const int n = int(states.size());
  if (n < 1) throw ArgumentError("need at least one site");
  HamiltonianSpec spec;
  spec.model = "product_state";
  spec.n_sites = n;
  json amps = json::array();
  LocalOperator H(n);
  for (int i = 0; i < n; ++i) {
    const auto& s = states[i];
    if (std::abs(s.norm() - 1.0) > 1e-12) throw ArgumentError("site state is not normalized");
    amps.push_back({s(0).real(), s(0).imag(), s(1).real(), s(1).imag()});
    const double nx = 2.0 * (std::conj(s(0)) * s(1)).real();
    const double ny = 2.0 * (std::conj(s(0)) * s(1)).imag();
    const double nz = std::norm(s(0)) - std::norm(s(1));
    H.add_term(0.5, PauliString::identity(n));
    H.add_term(-0.5 * nx, PauliString::single(n, i, PauliLetter::X));
    H.add_term(-0.5 * ny, PauliString::single(n, i, PauliLetter::Y));
    H.add_term(-0.5 * nz, PauliString::single(n, i, PauliLetter::Z));
  }
  H.canonicalize();
  spec.params = {{"amplitudes", amps}};
  spec.terms = std::move(H);
  detail::certify(spec);
  return spec;
}

inline StateVector make_product_state(const std::vector<Eigen::Vector2cd>& states) {
  const int n = int(states.size());
  StateVector psi = StateVector::zeros(n);
  for (std::size_t idx = 0; idx < psi.dim(); ++idx) {
    complexd a(1.0, 0.0);
    for (int i = 0; i < n; ++i) a *= states[i]((idx >> i) & 1u);
    psi[idx] = a;
  }
  return psi;
}

inline StateVector make_ghz(int n) {
  if (n < 2) throw ArgumentError("GHZ needs n >= 2");
  StateVector psi = StateVector::zeros(n);
  const double r = 1.0 / std::sqrt(2.0);
  psi[0] = r;
  psi[(std::uint64_t(1) << n) - 1] = r;
  return psi;
}

inline StateVector make_w(int n) {
  if (n < 2) throw ArgumentError("W needs n >= 2");
  StateVector psi = StateVector::zeros(n);
  const double r = 1.0 / std::sqrt(double(n));
  for (int i = 0; i < n; ++i) psi[std::uint64_t(1) << i] = r;
  return psi;
}

// (|0>_0 |0...0> + |1>_0 |W_{1..n-1}>) / sqrt(2)
inline StateVector make_ghz_w_hybrid(int n) {
  if (n < 3) throw ArgumentError("hybrid needs n >= 3");
  StateVector psi = StateVector::zeros(n);
  psi[0] = 1.0 / std::sqrt(2.0);
  const double r = 1.0 / std::sqrt(2.0 * (n - 1));
  for (int i = 1; i < n; ++i) psi[(std::uint64_t(1) << i) | 1u] = r;
  return psi;
}

}  // namespace revlab
