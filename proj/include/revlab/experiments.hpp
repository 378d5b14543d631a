#pragma once

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "revlab/csv.hpp"
#include "revlab/fluctuation.hpp"
#include "revlab/meanfield.hpp"
#include "revlab/models.hpp"
#include "revlab/reversibility.hpp"
#include "revlab/rng.hpp"
#include "revlab/version.hpp"

namespace revlab {

// --- config plumbing ---------------------------------------------------------

namespace cfg {

inline const json& require_key(const json& j, const std::string& key, const std::string& ctx) {
  if (!j.is_object() || !j.contains(key))
    throw ArgumentError("missing config key '" + (ctx.empty() ? key : ctx + "." + key) + "'");
  return j.at(key);
}

inline void reject_unknown(const json& j, const std::vector<std::string>& allowed,
                           const std::string& ctx) {
  if (!j.is_object()) throw ArgumentError("config node '" + ctx + "' must be an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const auto& a : allowed) ok = ok || it.key() == a;
    if (!ok) throw ArgumentError("unknown config key '" + ctx + "." + it.key() + "'");
  }
}

inline double number(const json& j, const std::string& key, const std::string& ctx,
                     std::optional<double> fallback = std::nullopt) {
  if (!j.contains(key)) {
    if (fallback) return *fallback;
    throw ArgumentError("missing config key '" + ctx + "." + key + "'");
  }
  if (!j.at(key).is_number())
    throw ArgumentError("config key '" + ctx + "." + key + "' must be a number");
  return j.at(key).get<double>();
}

}  // namespace cfg

// Builds a Hamiltonian from the model config document:
//   {"model": name, "n": int, "params": {...}, "boundary": string}
inline HamiltonianSpec build_model_from_config(const json& cfg_in) {
  cfg::reject_unknown(cfg_in, {"model", "n", "params", "boundary"}, "model");
  const std::string name = cfg::require_key(cfg_in, "model", "").get<std::string>();
  const json params = cfg_in.value("params", json::object());
  const std::string boundary = cfg_in.value("boundary", "");

  if (name == "transverse_ising") {
    const int n = int(cfg::number(cfg_in, "n", "model"));
    return build_transverse_ising(n, cfg::number(params, "J", "model.params", 1.0),
                                  cfg::number(params, "h", "model.params", 1.0),
                                  boundary == "open" ? Boundary::Open : Boundary::Periodic);
  }
  if (name == "graph_state") {
    const int n = int(cfg::number(cfg_in, "n", "model"));
    std::vector<std::pair<int, int>> edges;
    const std::string graph = params.value("graph", "ring");
    if (params.contains("edges")) {
      for (const auto& e : params.at("edges")) edges.emplace_back(e.at(0), e.at(1));
    } else if (graph == "ring") {
      edges = ring_edges(n);
    } else if (graph == "path") {
      edges = path_edges(n);
    } else {
      throw ArgumentError("unknown config value 'model.params.graph' = " + graph);
    }
    return build_graph_state_hamiltonian(n, edges);
  }
  if (name == "cluster_chain") {
    const int n = int(cfg::number(cfg_in, "n", "model"));
    return build_cluster_chain(n, boundary == "open_degenerate" ? ClusterBoundary::OpenDegenerate
                                                                : ClusterBoundary::FixedIdentity)
        .spec;
  }
  if (name == "toric_code") {
    const int lx = int(cfg::number(params, "Lx", "model.params"));
    const int ly = int(cfg::number(params, "Ly", "model.params"));
    return build_toric_code(lx, ly, boundary == "planar" ? Topology::Planar : Topology::Torus).spec;
  }
  if (name == "lmg") {
    const int n = int(cfg::number(cfg_in, "n", "model"));
    return build_lmg_sector(n, cfg::number(params, "lambda", "model.params", 1.0),
                            cfg::number(params, "gamma", "model.params", 0.0),
                            cfg::number(params, "h", "model.params", 1.0));
  }
  if (name == "product_state") {
    const int n = int(cfg::number(cfg_in, "n", "model"));
    std::vector<Eigen::Vector2cd> sites(n);
    if (params.contains("thetas")) {
      const auto& th = params.at("thetas");
      if (int(th.size()) != n) throw ArgumentError("model.params.thetas must list n angles");
      for (int i = 0; i < n; ++i)
        sites[i] << std::cos(th.at(i).get<double>()), std::sin(th.at(i).get<double>());
    } else {
      const std::string kind = params.value("state", "tilted");
      for (int i = 0; i < n; ++i) {
        double theta = kind == "zeros" ? 0.0 : kind == "plus" ? 0.7853981633974483 : 0.3 + 0.1 * i;
        sites[i] << std::cos(theta), std::sin(theta);
      }
    }
    return build_product_state_hamiltonian(sites);
  }
  throw ArgumentError("unknown config value 'model' = " + name);
}

// Disturbance configs:
//   {"type": "projector_zero", "sites": [..]}   projector onto |0..0> there
//   {"type": "pauli", "string": "X0 X1 X2"}
inline DisturbanceSpec build_disturbance_from_config(const json& j, int n_sites) {
  cfg::reject_unknown(j, {"type", "sites", "string", "label"}, "disturbance");
  const std::string type = cfg::require_key(j, "type", "disturbance").get<std::string>();
  if (type == "projector_zero") {
    std::vector<int> sites;
    for (const auto& s : cfg::require_key(j, "sites", "disturbance")) sites.push_back(s.get<int>());
    LocalOperator p = LocalOperator::identity(n_sites);
    for (int s : sites) {
      LocalOperator f = LocalOperator::identity(n_sites, 0.5);
      f += 0.5 * LocalOperator::from_pauli(1.0, PauliString::single(n_sites, s, PauliLetter::Z));
      p = p * f;
    }
    return make_disturbance(p, sites, j.value("label", "projector_zero"));
  }
  if (type == "pauli") {
    auto ps = PauliString::parse(cfg::require_key(j, "string", "disturbance").get<std::string>(),
                                 n_sites);
    return make_disturbance(LocalOperator::from_pauli(1.0, ps), std::nullopt,
                            j.value("label", "pauli"));
  }
  throw ArgumentError("unknown config value 'disturbance.type' = " + type);
}

// seeded 2-local ensemble used by the tail experiment and the verifier
inline HamiltonianSpec random_two_local(int n, int term_count, std::uint64_t seed,
                                        std::uint64_t stream) {
  CounterRng rng(seed, stream);
  LocalOperator h(n);
  for (int t = 0; t < term_count; ++t) {
    PauliString p(n);
    int a = int(rng.below(n)), b = int(rng.below(n));
    p.set_letter(a, static_cast<PauliLetter>(1 + rng.below(3)));
    if (b != a) p.set_letter(b, static_cast<PauliLetter>(1 + rng.below(3)));
    h.add_term(rng.uniform(-1.0, 1.0), p);
  }
  h.canonicalize();
  HamiltonianSpec spec;
  spec.model = "random_2local";
  spec.params = {{"n", n}, {"terms", term_count}, {"seed", seed}, {"stream", stream}};
  spec.n_sites = n;
  spec.terms = std::move(h);
  spec.k = spec.terms.locality_q();
  spec.g = interaction_strength_g(spec);
  return spec;
}

inline DisturbanceSpec random_disturbance(int n, std::uint64_t seed, std::uint64_t stream) {
  CounterRng rng(seed, stream ^ 0x5151'5151'0000'0000ULL);
  LocalOperator gamma(n);
  PauliString p(n);
  int a = int(rng.below(n)), b = int(rng.below(n));
  p.set_letter(a, static_cast<PauliLetter>(1 + rng.below(3)));
  if (b != a && rng.uniform() < 0.5) p.set_letter(b, static_cast<PauliLetter>(1 + rng.below(3)));
  gamma.add_term(1.0, p);
  gamma.canonicalize();
  return make_disturbance(gamma, std::nullopt, "random_pauli");
}

// --- worker pool ---------------------------------------------------------------

inline int worker_count() {
  const char* env = std::getenv("REVLAB_THREADS");
  if (!env) return 1;
  int v = std::atoi(env);
  if (v < 1) return 1;
  return std::min(v, 64);
}

// Grid points run on a small pool; results land in slot order, so output
// files do not depend on scheduling.
template <class Fn>
void parallel_for_points(std::size_t count, Fn&& fn) {
  const int workers = std::min<std::size_t>(worker_count(), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
    });
  for (auto& t : pool) t.join();
}

// --- experiment runner ----------------------------------------------------------

struct RunOutputs {
  std::vector<std::string> files;
  json echo;
};

namespace detail {

inline std::string model_label(const HamiltonianSpec& spec) {
  return spec.model + "_n" + std::to_string(spec.n_sites);
}

inline void run_reverse(const json& manifest, const std::filesystem::path& dir, RunOutputs& out) {
  cfg::reject_unknown(manifest, {"experiment", "model", "grid", "disturbances", "seed", "output_dir"},
                      "manifest");
  auto spec = build_model_from_config(cfg::require_key(manifest, "model", "manifest"));
  std::vector<int> qs;
  for (const auto& q : cfg::require_key(cfg::require_key(manifest, "grid", "manifest"), "q",
                                        "manifest.grid"))
    qs.push_back(q.get<int>());
  std::vector<DisturbanceSpec> dists;
  for (const auto& d : cfg::require_key(manifest, "disturbances", "manifest"))
    dists.push_back(build_disturbance_from_config(d, spec.n_sites));

  auto ground = ground_state(spec);
  struct Row {
    std::string dist;
    ReverseResult r;
  };
  std::vector<Row> rows(dists.size() * qs.size());
  parallel_for_points(rows.size(), [&](std::size_t i) {
    const auto& d = dists[i / qs.size()];
    const int q = qs[i % qs.size()];
    rows[i] = {d.label, chebyshev_reverse(spec, ground, d, q)};
  });

  const auto path = dir / "reverse_results.csv";
  CsvWriter csv(path.string());
  csv.header({"model", "n", "q", "k", "g", "L_size", "deltaE", "n0", "xi", "method", "residual",
              "rhs_bound", "margin", "overlap_abs"});
  for (const auto& row : rows) {
    csv.row({model_label(spec) + ":" + row.dist, (long long)spec.n_sites, (long long)row.r.q,
             (long long)spec.k, spec.g, (long long)row.r.params.L_size, row.r.params.deltaE,
             (long long)row.r.n0, row.r.params.xi, row.r.method, row.r.residual, row.r.rhs_bound,
             row.r.rhs_bound - row.r.residual, std::abs(row.r.overlap)});
  }
  out.files.push_back(path.string());
}

inline void run_tail(const json& manifest, const std::filesystem::path& dir, RunOutputs& out) {
  cfg::reject_unknown(manifest, {"experiment", "ensemble", "seed", "output_dir"}, "manifest");
  const json& ens = cfg::require_key(manifest, "ensemble", "manifest");
  cfg::reject_unknown(ens, {"count", "n", "terms"}, "manifest.ensemble");
  const int count = int(cfg::number(ens, "count", "manifest.ensemble", 20));
  const int n = int(cfg::number(ens, "n", "manifest.ensemble", 8));
  const int terms = int(cfg::number(ens, "terms", "manifest.ensemble", 12));
  const std::uint64_t seed = manifest.value("seed", 20240311ULL);

  std::vector<TailCheckReport> reps(count);
  parallel_for_points(count, [&](std::size_t i) {
    auto spec = random_two_local(n, terms, seed, i);
    auto ground = ground_state(spec);
    reps[i] = energy_tail_check(spec, ground, random_disturbance(n, seed, i));
  });

  const auto path = dir / "tail_results.csv";
  CsvWriter csv(path.string());
  csv.header({"instance", "energy", "tail", "bound", "margin"});
  for (int i = 0; i < count; ++i)
    for (const auto& r : reps[i].rows)
      csv.row({(long long)i, r.energy, r.tail, r.bound, r.margin});
  out.files.push_back(path.string());
}

inline void run_fluctuation(const json& manifest, const std::filesystem::path& dir,
                            RunOutputs& out) {
  cfg::reject_unknown(manifest, {"experiment", "model", "grid", "additive", "seed", "output_dir"},
                      "manifest");
  json base = cfg::require_key(manifest, "model", "manifest");
  std::vector<int> ns;
  if (manifest.contains("grid")) {
    cfg::reject_unknown(manifest.at("grid"), {"n"}, "manifest.grid");
    for (const auto& v : cfg::require_key(manifest.at("grid"), "n", "manifest.grid"))
      ns.push_back(v.get<int>());
  } else {
    ns.push_back(int(cfg::number(base, "n", "model")));
  }
  const char axis = manifest.value("additive", json{{"axis", "z"}}).value("axis", "z")[0];

  struct Row {
    int n;
    double deltaE, variance, ratio;
  };
  std::vector<Row> rows(ns.size());
  parallel_for_points(ns.size(), [&](std::size_t i) {
    json cfg_n = base;
    cfg_n["n"] = ns[i];
    auto spec = build_model_from_config(cfg_n);
    auto ground = ground_state(spec);
    auto t = gap_variance_tradeoff(spec, ground, additive_pauli_sum(spec.n_sites, axis));
    rows[i] = {spec.n_sites, t.deltaE, t.variance, t.ratio};
  });

  const auto path = dir / "fluctuation_results.csv";
  CsvWriter csv(path.string());
  csv.header({"N", "deltaE", "variance", "value"});
  std::vector<double> xs, vars;
  for (const auto& r : rows) {
    csv.row({(long long)r.n, r.deltaE, r.variance, r.ratio});
    xs.push_back(double(r.n));
    vars.push_back(r.variance);
  }
  out.files.push_back(path.string());
  if (rows.size() >= 2) {
    auto fit = fit_power_law(xs, vars);
    json fj = {{"exponent", fit.exponent},
               {"stderr", fit.stderr_exponent},
               {"window", {rows.front().n, rows.back().n}}};
    const auto fpath = dir / "fluctuation_fit.json";
    std::ofstream(fpath) << fj.dump(2) << '\n';
    out.files.push_back(fpath.string());
  }
}

inline void run_lmg_scaling(const json& manifest, const std::filesystem::path& dir,
                            RunOutputs& out) {
  cfg::reject_unknown(manifest,
                      {"experiment", "N_list", "lambda", "gamma", "h", "seed", "output_dir"},
                      "manifest");
  std::vector<int> Ns;
  for (const auto& v : cfg::require_key(manifest, "N_list", "manifest")) Ns.push_back(v.get<int>());
  const double lambda = cfg::number(manifest, "lambda", "manifest", 1.0);
  const double gamma = cfg::number(manifest, "gamma", "manifest", 0.0);
  const double h = cfg::number(manifest, "h", "manifest", 1.0);

  auto result = lmg_scaling_fit(Ns, lambda, gamma, h);
  const auto path = dir / "lmg_scaling.csv";
  CsvWriter csv(path.string());
  csv.header({"N", "deltaE", "variance", "value"});
  for (const auto& p : result.points)
    csv.row({(long long)p.N, p.deltaE, p.variance, p.deltaE * p.variance / double(p.N)});
  out.files.push_back(path.string());

  json fj = {{"gap",
              {{"exponent", result.gap_fit.exponent},
               {"stderr", result.gap_fit.stderr_exponent},
               {"window", {Ns.front(), Ns.back()}}}},
             {"variance",
              {{"exponent", result.variance_fit.exponent},
               {"stderr", result.variance_fit.stderr_exponent},
               {"window", {Ns.front(), Ns.back()}}}}};
  const auto fpath = dir / "lmg_fit.json";
  std::ofstream(fpath) << fj.dump(2) << '\n';
  out.files.push_back(fpath.string());
}

inline void run_meanfield(const json& manifest, const std::filesystem::path& dir, RunOutputs& out) {
  cfg::reject_unknown(manifest, {"experiment", "L_list", "seed", "output_dir"}, "manifest");
  std::vector<int> Ls;
  if (manifest.contains("L_list"))
    for (const auto& v : manifest.at("L_list")) Ls.push_back(v.get<int>());
  else
    for (int l = 4; l <= 14; ++l) Ls.push_back(l);

  const auto pairs_path = dir / "meanfield_pairs.csv";
  CsvWriter pairs(pairs_path.string());
  pairs.header({"model", "n", "i", "j", "deviation_norm"});
  const auto sweep_path = dir / "meanfield_hybrid.csv";
  CsvWriter sweep(sweep_path.string());
  sweep.header({"L_size", "deviation_sum"});

  std::vector<double> xs, ys;
  for (int l : Ls) {
    auto psi = make_ghz_w_hybrid(l + 1);
    std::vector<int> L;
    for (int j = 1; j <= l; ++j) L.push_back(j);
    auto dev = mf_deviation_sum(psi, 0, L);
    sweep.row({(long long)l, dev.sum});
    xs.push_back(double(l));
    ys.push_back(dev.sum);
    if (l == Ls.back())
      for (std::size_t k = 0; k < dev.sites_j.size(); ++k)
        pairs.row({std::string("hybrid"), (long long)(l + 1), 0LL, (long long)dev.sites_j[k],
                   dev.deviation_norm[k]});
  }
  out.files.push_back(sweep_path.string());
  out.files.push_back(pairs_path.string());

  auto fit = fit_power_law(xs, ys);
  json fj = {{"exponent", fit.exponent},
             {"stderr", fit.stderr_exponent},
             {"window", {Ls.front(), Ls.back()}}};
  const auto fpath = dir / "meanfield_fit.json";
  std::ofstream(fpath) << fj.dump(2) << '\n';
  out.files.push_back(fpath.string());
}

inline void run_macroscopicity(const json& manifest, const std::filesystem::path& dir,
                               RunOutputs& out) {
  cfg::reject_unknown(manifest, {"experiment", "states", "seed", "output_dir"}, "manifest");
  const std::uint64_t seed = manifest.value("seed", 20240311ULL);
  struct Row {
    std::string name;
    int n;
    FisherReport rep;
  };
  std::vector<json> states;
  for (const auto& s : cfg::require_key(manifest, "states", "manifest")) states.push_back(s);
  std::vector<Row> rows(states.size());
  parallel_for_points(states.size(), [&](std::size_t i) {
    const json& s = states[i];
    cfg::reject_unknown(s, {"state", "n"}, "manifest.states[]");
    const std::string kind = cfg::require_key(s, "state", "manifest.states[]").get<std::string>();
    const int n = int(cfg::number(s, "n", "manifest.states[]"));
    StateVector psi = StateVector::basis_state(1, 0);
    if (kind == "ghz")
      psi = make_ghz(n);
    else if (kind == "w")
      psi = make_w(n);
    else if (kind == "hybrid")
      psi = make_ghz_w_hybrid(n);
    else if (kind == "product_random") {
      CounterRng rng(seed, i);
      std::vector<Eigen::Vector2cd> sites(n);
      for (auto& v : sites) {
        v << complexd(rng.normal(), rng.normal()), complexd(rng.normal(), rng.normal());
        v.normalize();
      }
      psi = make_product_state(sites);
    } else {
      throw ArgumentError("unknown config value 'states[].state' = " + kind);
    }
    rows[i] = {kind, n, fisher_neff(psi)};
  });

  const auto path = dir / "macroscopicity.csv";
  CsvWriter csv(path.string());
  csv.header({"state", "n", "neff_lower", "neff_upper"});
  for (const auto& r : rows)
    csv.row({r.name, (long long)r.n, r.rep.neff_lower, r.rep.neff_upper});
  out.files.push_back(path.string());
}

inline void run_filter_profile(const json& manifest, const std::filesystem::path& dir,
                               RunOutputs& out) {
  cfg::reject_unknown(manifest,
                      {"experiment", "model", "q", "region_size", "points", "seed", "output_dir"},
                      "manifest");
  auto spec = build_model_from_config(cfg::require_key(manifest, "model", "manifest"));
  const int q = int(cfg::number(manifest, "q", "manifest", 8));
  const int region = int(cfg::number(manifest, "region_size", "manifest", 4));
  const int points = int(cfg::number(manifest, "points", "manifest", 400));
  auto ground = ground_state(spec);
  auto p = filter_params(q, spec.k, spec.g, region, ground.gap);

  const double x_hi = (2.0 * p.Ec + p.deltaE) * 1.25;
  const auto path = dir / "filter_profile.csv";
  CsvWriter csv(path.string());
  csv.header({"x", "F_R", "bound"});
  for (int i = 0; i <= points; ++i) {
    const double x = x_hi * double(i) / double(points);
    double bound;
    if (x < p.deltaE)
      bound = 1.0;  // |F_R| <= 1 between the ground energy and the band
    else if (x <= 2.0 * p.Ec + p.deltaE)
      bound = 2.0 * p.suppression();
    else
      bound = std::pow((2.0 * x - 2.0 * p.deltaE) / p.Ec - 2.0, p.n0) * p.suppression();
    csv.row({x, eval_filter(p, x), bound});
  }
  out.files.push_back(path.string());
}

}  // namespace detail

// Runs one experiment manifest; writes the experiment CSV/JSON plus a
// manifest echo (resolved inputs, version, wall clock). Validation errors
// throw ArgumentError before anything is written.
inline RunOutputs run_experiment(const json& manifest) {
  const std::string kind =
      cfg::require_key(manifest, "experiment", "manifest").get<std::string>();
  const std::string out_dir = manifest.value("output_dir", "revlab_out");
  const auto t0 = std::chrono::steady_clock::now();

  RunOutputs out;
  const std::filesystem::path dir(out_dir);
  std::filesystem::create_directories(dir);

  if (kind == "reverse")
    detail::run_reverse(manifest, dir, out);
  else if (kind == "tail")
    detail::run_tail(manifest, dir, out);
  else if (kind == "fluctuation")
    detail::run_fluctuation(manifest, dir, out);
  else if (kind == "lmg_scaling")
    detail::run_lmg_scaling(manifest, dir, out);
  else if (kind == "meanfield")
    detail::run_meanfield(manifest, dir, out);
  else if (kind == "macroscopicity")
    detail::run_macroscopicity(manifest, dir, out);
  else if (kind == "filter_profile")
    detail::run_filter_profile(manifest, dir, out);
  else
    throw ArgumentError("unknown config value 'experiment' = " + kind);

  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  out.echo = {{"manifest", manifest},
              {"tool_version", kVersion},
              {"wall_clock_seconds", secs},
              {"outputs", out.files}};
  const auto echo_path = dir / "manifest_echo.json";
  std::ofstream(echo_path) << out.echo.dump(2) << '\n';
  out.files.push_back(echo_path.string());
  return out;
}

}  // namespace revlab
