#pragma once

#include <cmath>
#include <vector>

#include "revlab/errors.hpp"
#include "revlab/models.hpp"
#include "revlab/spectral.hpp"
#include "revlab/state.hpp"

namespace revlab {

// T_n(x), evaluated in the numerically right regime: cos(n arccos x) inside
// [-1, 1], sign^n cosh(n arccosh|x|) outside.
inline double chebyshev_T(int n, double x) {
  if (n < 0) throw ArgumentError("Chebyshev order must be nonnegative");
  if (n == 0) return 1.0;
  const double ax = std::abs(x);
  double v;
  if (ax <= 1.0)
    v = std::cos(n * std::acos(ax));
  else
    v = std::cosh(n * std::acosh(ax));
  if (x < 0.0 && (n % 2) == 1) v = -v;
  return v;
}

// log |T_n(x)| for |x| >= 1, overflow-free
inline double log_abs_chebyshev_T(int n, double x) {
  const double ax = std::abs(x);
  if (ax < 1.0) throw ArgumentError("log form needs |x| >= 1");
  if (n == 0) return 0.0;
  const double t = std::acosh(ax);
  // log cosh(n t) = n t + log(1 + e^{-2 n t}) - log 2
  return n * t + std::log1p(std::exp(-2.0 * n * t)) - std::log(2.0);
}

struct ChebyBoundReport {
  int order = 0;
  // 1 - max |T_n| on [-1, 1] (>= 0 when the bound holds)
  double margin_unit_interval = 0.0;
  // min over samples of (2|x|)^n / 2 - |T_n(x)|, in log space
  double margin_upper_outside = 0.0;
  // min over samples of |T_n(x)| - exp(2n sqrt((|x|-1)/(|x|+1)))/2, in log space
  double margin_lower_outside = 0.0;
  bool holds = false;
};

// Samples the three Chebyshev facts the filter construction rests on:
//   |T_n| <= 1 on [-1,1];  |T_n(x)| <= (2|x|)^n / 2  and
//   |T_n(x)| >= exp(2 n sqrt((|x|-1)/(|x|+1))) / 2   for |x| >= 1.
// Margins are reported in log space for the outside-interval pair.
inline ChebyBoundReport verify_cheby_bounds(int n, int sample_count = 10000,
                                            double outside_max = 8.0) {
  if (n < 1) throw ArgumentError("order must be >= 1");
  ChebyBoundReport rep;
  rep.order = n;

  double max_inside = 0.0;
  for (int i = 0; i < sample_count; ++i) {
    const double x = -1.0 + 2.0 * double(i) / double(sample_count - 1);
    max_inside = std::max(max_inside, std::abs(chebyshev_T(n, x)));
  }
  rep.margin_unit_interval = 1.0 - max_inside;

  double worst_hi = 1e300, worst_lo = 1e300;
  for (int i = 0; i < sample_count; ++i) {
    const double x = 1.0 + (outside_max - 1.0) * double(i) / double(sample_count - 1);
    const double logT = log_abs_chebyshev_T(n, x);
    const double log_upper = n * std::log(2.0 * x) - std::log(2.0);
    const double log_lower = 2.0 * n * std::sqrt((x - 1.0) / (x + 1.0)) - std::log(2.0);
    worst_hi = std::min(worst_hi, log_upper - logT);
    worst_lo = std::min(worst_lo, logT - log_lower);
  }
  rep.margin_upper_outside = worst_hi;
  rep.margin_lower_outside = worst_lo;
  rep.holds = rep.margin_unit_interval >= -1e-12 && worst_hi >= -1e-12 && worst_lo >= -1e-12;
  return rep;
}

// Parameter tuple of the scaled reverse filter:
//   n0 = floor(q/k), E_c = g|L| + 8 g k n0, xi = sqrt(1 + 2 E_c / deltaE),
//   lambda = 1/(4 g k).
struct FilterParams {
  int q = 0;
  int k = 1;
  int n0 = 0;
  double g = 0.0;
  int L_size = 1;
  double deltaE = 0.0;
  double Ec = 0.0;
  double xi = 0.0;
  double lambda = 0.0;
  bool degenerate = false;  // n0 = 0: the filter is the constant 1

  double suppression() const { return std::exp(-2.0 * n0 / xi); }
};

inline FilterParams filter_params(int q, int k, double g, int L_size, double deltaE) {
  if (q < 0 || k < 1 || L_size < 1) throw ArgumentError("invalid filter arguments");
  if (!(g > 0.0)) throw ArgumentError("interaction strength must be positive");
  if (!(deltaE > 0.0)) throw GaplessError("filter needs a strictly positive gap");
  FilterParams p;
  p.q = q;
  p.k = k;
  p.n0 = q / k;
  p.g = g;
  p.L_size = L_size;
  p.deltaE = deltaE;
  p.Ec = g * L_size + 8.0 * g * k * p.n0;
  p.xi = std::sqrt(1.0 + 2.0 * p.Ec / deltaE);
  p.lambda = 1.0 / (4.0 * g * k);
  p.degenerate = p.n0 == 0;
  return p;
}

// F_R(x) = T_{n0}((x - deltaE)/E_c - 1) / T_{n0}(-deltaE/E_c - 1); the map
// sends [deltaE, 2 E_c + deltaE] onto [-1, 1] and fixes F_R(0) = 1.
inline double eval_filter(const FilterParams& p, double x) {
  if (p.n0 == 0) return 1.0;
  const double num = chebyshev_T(p.n0, (x - p.deltaE) / p.Ec - 1.0);
  const double den = chebyshev_T(p.n0, -p.deltaE / p.Ec - 1.0);
  return num / den;
}

inline double log_abs_filter(const FilterParams& p, double x) {
  if (p.n0 == 0) return 0.0;
  const double y = (x - p.deltaE) / p.Ec - 1.0;
  const double den = log_abs_chebyshev_T(p.n0, -p.deltaE / p.Ec - 1.0);
  if (std::abs(y) <= 1.0) return std::log(std::abs(chebyshev_T(p.n0, y))) - den;
  return log_abs_chebyshev_T(p.n0, y) - den;
}

struct FilterReport {
  double at_zero = 0.0;             // F_R(0)
  double sampled_sup = 0.0;         // max |F_R| over [deltaE, 2Ec + deltaE]
  double cap = 0.0;                 // 2 e^{-2 n0 / xi}
  bool in_band_bound_holds = false;
};

inline FilterReport profile_filter(const FilterParams& p, int sample_count = 10000) {
  FilterReport rep;
  rep.at_zero = eval_filter(p, 0.0);
  double sup = 0.0;
  for (int i = 0; i < sample_count; ++i) {
    const double x = p.deltaE + (2.0 * p.Ec) * double(i) / double(sample_count - 1);
    sup = std::max(sup, std::abs(eval_filter(p, x)));
  }
  rep.sampled_sup = sup;
  rep.cap = 2.0 * p.suppression();
  rep.in_band_bound_holds = sup <= rep.cap;
  return rep;
}

// F_R(H)|psi> by the three-term recurrence on Y = (H - E0 - deltaE)/E_c - I:
// exactly n0 Hamiltonian applications, one scalar normalization at the end.
// energy_shift is the ground energy of spec (the spectrum is used shifted so
// E0 = 0, as the filter construction assumes).
inline StateVector apply_filter(const FilterParams& p, const HamiltonianSpec& spec,
                                double energy_shift, const StateVector& psi) {
  if (p.n0 == 0) return psi;
  auto apply_y = [&](const StateVector& v) {
    StateVector out = apply_hamiltonian(spec, v);
    out.add_scaled(-(energy_shift + p.deltaE), v);
    out.scale(1.0 / p.Ec);
    out.add_scaled(-1.0, v);
    return out;
  };
  StateVector t_prev = psi;
  StateVector t_cur = apply_y(psi);
  for (int j = 2; j <= p.n0; ++j) {
    StateVector t_next = apply_y(t_cur);
    t_next.scale(2.0);
    t_next.add_scaled(-1.0, t_prev);
    if (t_next.norm() > 1e150)
      throw RangeError("filter recurrence overflow: spectrum reaches too far beyond 2Ec + deltaE");
    t_prev = std::move(t_cur);
    t_cur = std::move(t_next);
  }
  const double den = chebyshev_T(p.n0, -p.deltaE / p.Ec - 1.0);
  t_cur.scale(1.0 / den);
  return t_cur;
}

struct HighRangePoint {
  double x = 0.0;
  // log-space margins: rhs - lhs of |F_R(x)| e^{-lambda(x - c)} <=
  // e^{-2n0/xi} e^{-lambda(x - c)/2} for the two exponent offsets c = 2g|L|
  // and c = 6g|L|; the 6g|L| variant is the stronger one and implies the
  // other. Both margins >= 0 means both hold.
  double margin_2gL = 0.0;
  double margin_6gL = 0.0;
};

struct HighRangeReport {
  std::vector<HighRangePoint> points;
  double g_at_band_edge = 0.0;  // G(2Ec + deltaE) = -2n0 - lambda deltaE / 2 + n0 log 2
  bool holds_2gL = false;
  bool holds_6gL = false;
};

// Evaluates the damped-growth inequality on a grid of x >= 2Ec + deltaE: the
// filter's blowup beyond the band is cancelled by the exponential decay of
// the energy tail.
inline HighRangeReport high_range_product_check(const FilterParams& p,
                                                const std::vector<double>& x_grid) {
  HighRangeReport rep;
  rep.g_at_band_edge = -2.0 * p.n0 - p.lambda * p.deltaE / 2.0 + p.n0 * std::log(2.0);
  bool main_ok = true, app_ok = true;
  const double band_edge = 2.0 * p.Ec + p.deltaE;
  for (double x : x_grid) {
    if (x < band_edge - 1e-9) throw ArgumentError("high-range grid point below 2Ec + deltaE");
    HighRangePoint pt;
    pt.x = x;
    const double logF = log_abs_filter(p, x);
    const double log_sup = std::log(p.suppression());
    // lhs <= rhs  <=>  log|F| - here  <= log_sup - here/2
    const double c_main = 2.0 * p.g * p.L_size;
    const double c_app = 6.0 * p.g * p.L_size;
    pt.margin_2gL = (log_sup - p.lambda * (x - c_main) / 2.0) - (logF - p.lambda * (x - c_main));
    pt.margin_6gL = (log_sup - p.lambda * (x - c_app) / 2.0) - (logF - p.lambda * (x - c_app));
    main_ok = main_ok && pt.margin_2gL >= -1e-10;
    app_ok = app_ok && pt.margin_6gL >= -1e-10;
    rep.points.push_back(pt);
  }
  rep.holds_2gL = main_ok;
  rep.holds_6gL = app_ok;
  return rep;
}

}  // namespace revlab
