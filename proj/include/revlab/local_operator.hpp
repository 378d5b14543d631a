#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "revlab/pauli.hpp"
#include "revlab/state.hpp"

namespace revlab {

// Weighted sum of Pauli strings in canonical merged form: strings are stored
// with letter phase +1, phases folded into the coefficients, duplicates
// merged, terms with |coeff| < kCoeffDrop removed, terms ordered by
// (zmask, xmask). locality_q is the largest term support.
class LocalOperator {
 public:
  static constexpr double kCoeffDrop = 1e-14;

  struct Term {
    complexd coeff;
    PauliString op;  // letter phase +1
  };

  LocalOperator() = default;
  explicit LocalOperator(int n_sites) : n_(n_sites) {}

  static LocalOperator zero(int n_sites) { return LocalOperator(n_sites); }

  static LocalOperator identity(int n_sites, complexd c = 1.0) {
    LocalOperator o(n_sites);
    o.add_term(c, PauliString::identity(n_sites));
    o.canonicalize();
    return o;
  }

  static LocalOperator from_terms(int n_sites, const std::vector<Term>& terms) {
    LocalOperator o(n_sites);
    for (const auto& t : terms) o.add_term(t.coeff, t.op);
    o.canonicalize();
    return o;
  }

  static LocalOperator from_pauli(complexd coeff, const PauliString& p) {
    LocalOperator o(p.n_sites());
    o.add_term(coeff, p);
    o.canonicalize();
    return o;
  }

  int n_sites() const { return n_; }
  const std::vector<Term>& terms() const { return terms_; }
  std::size_t term_count() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }

  // folds the string's phase into the coefficient; call canonicalize() after
  // a batch of adds
  void add_term(complexd coeff, const PauliString& p) {
    if (p.n_sites() != n_) throw DimensionError("term size mismatch");
    PauliString b = p.bare();
    complexd fold = PauliString::ipow(p.phase_exponent() - b.phase_exponent());
    terms_.push_back({coeff * fold, b});
    dirty_ = true;
  }

  void canonicalize() {
    if (!dirty_) return;
    std::sort(terms_.begin(), terms_.end(), [](const Term& a, const Term& b) {
      if (a.op.zmask() != b.op.zmask()) return a.op.zmask() < b.op.zmask();
      return a.op.xmask() < b.op.xmask();
    });
    std::vector<Term> merged;
    for (const auto& t : terms_) {
      if (!merged.empty() && merged.back().op.same_letters(t.op))
        merged.back().coeff += t.coeff;
      else
        merged.push_back(t);
    }
    terms_.clear();
    for (const auto& t : merged)
      if (std::abs(t.coeff) >= kCoeffDrop) terms_.push_back(t);
    dirty_ = false;
  }

  int locality_q() const {
    int q = 0;
    for (const auto& t : terms_) q = std::max(q, t.op.support_size());
    return q;
  }

  std::uint64_t support_mask() const {
    std::uint64_t m = 0;
    for (const auto& t : terms_) m |= t.op.support_mask();
    return m;
  }

  std::vector<int> support() const {
    std::vector<int> s;
    std::uint64_t m = support_mask();
    while (m) {
      s.push_back(std::countr_zero(m));
      m &= m - 1;
    }
    return s;
  }

  double triangle_norm() const {
    double s = 0.0;
    for (const auto& t : terms_) s += std::abs(t.coeff);
    return s;
  }

  LocalOperator adjoint() const {
    LocalOperator o(n_);
    for (const auto& t : terms_) o.add_term(std::conj(t.coeff), t.op.adjoint());
    o.canonicalize();
    return o;
  }

  bool is_hermitian(double tol = 1e-12) const {
    // canonical strings are Hermitian, so Hermiticity = real coefficients
    for (const auto& t : terms_)
      if (std::abs(t.coeff.imag()) > tol) return false;
    return true;
  }

  StateVector apply(const StateVector& psi) const {
    if (psi.n_sites() != n_) throw DimensionError("operator/state size mismatch");
    StateVector out = StateVector::zeros(n_);
    for (const auto& t : terms_) accumulate_pauli(out, t.coeff, t.op, psi);
    return out;
  }

  LocalOperator& operator+=(const LocalOperator& o) {
    if (o.n_ != n_) throw DimensionError("operator size mismatch");
    for (const auto& t : o.terms_) terms_.push_back(t);
    dirty_ = true;
    canonicalize();
    return *this;
  }

  friend LocalOperator operator+(LocalOperator a, const LocalOperator& b) {
    a += b;
    return a;
  }

  friend LocalOperator operator*(complexd c, LocalOperator o) {
    for (auto& t : o.terms_) t.coeff *= c;
    o.dirty_ = true;
    o.canonicalize();
    return o;
  }

  friend LocalOperator operator*(const LocalOperator& a, const LocalOperator& b) {
    if (a.n_ != b.n_) throw DimensionError("operator size mismatch");
    LocalOperator out(a.n_);
    for (const auto& ta : a.terms_)
      for (const auto& tb : b.terms_)
        out.add_term(ta.coeff * tb.coeff, compose(ta.op, tb.op));
    out.canonicalize();
    return out;
  }

  complexd expectation(const StateVector& psi) const { return inner(psi, apply(psi)); }

  bool commutes_with(const LocalOperator& o, double tol = 1e-12) const {
    LocalOperator c = (*this) * o + complexd(-1.0) * (o * (*this));
    return c.triangle_norm() <= tol;
  }

  // textual form, one term per line: "<coeff> * X0 Z3"
  std::string str() const {
    std::ostringstream out;
    out.precision(17);
    for (std::size_t i = 0; i < terms_.size(); ++i) {
      const auto& t = terms_[i];
      if (i) out << '\n';
      out << t.coeff.real();
      if (t.coeff.imag() != 0.0) {
        out << (t.coeff.imag() > 0 ? "+" : "-") << std::abs(t.coeff.imag()) << 'i';
      }
      out << " *";
      if (t.op.identity_letters()) {
        out << " I";
      } else {
        for (int s = 0; s < n_; ++s) {
          PauliLetter l = t.op.letter(s);
          if (l == PauliLetter::I) continue;
          out << ' ' << letter_char(l) << s;
        }
      }
    }
    return out.str();
  }

  static LocalOperator parse(const std::string& text, int n_sites) {
    LocalOperator o(n_sites);
    std::istringstream lines(text);
    std::string line;
    while (std::getline(lines, line)) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      auto star = line.find('*');
      if (star == std::string::npos) throw ArgumentError("term missing '*': " + line);
      o.add_term(parse_coeff(line.substr(0, star)),
                 PauliString::parse(line.substr(star + 1), n_sites));
    }
    o.canonicalize();
    return o;
  }

 private:
  static complexd parse_coeff(const std::string& s) {
    std::string t;
    for (char c : s)
      if (!std::isspace(static_cast<unsigned char>(c))) t += c;
    if (t.empty()) throw ArgumentError("empty coefficient");
    if (t.back() == 'i') {
      // forms: "bi", "a+bi", "a-bi"
      t.pop_back();
      std::size_t split = std::string::npos;
      for (std::size_t i = 1; i < t.size(); ++i) {
        if ((t[i] == '+' || t[i] == '-') && t[i - 1] != 'e' && t[i - 1] != 'E') split = i;
      }
      if (split == std::string::npos) return complexd(0.0, std::stod(t));
      return complexd(std::stod(t.substr(0, split)), std::stod(t.substr(split)));
    }
    return complexd(std::stod(t), 0.0);
  }

  int n_ = 0;
  std::vector<Term> terms_;
  bool dirty_ = false;
};

// Count of Pauli strings with support of size <= q inside a region of m sites.
inline double q_local_basis_count(int region_size, int q) {
  double total = 0.0;
  double binom = 1.0;  // C(m, s)
  double pow3 = 1.0;
  for (int s = 0; s <= q && s <= region_size; ++s) {
    total += pow3 * binom;
    binom = binom * (region_size - s) / (s + 1);
    pow3 *= 3.0;
  }
  return total;
}

namespace detail {

inline bool commutes_with_all(const PauliString& p, const std::vector<PauliString>* symmetry) {
  if (!symmetry) return true;
  for (const auto& g : *symmetry)
    if (!p.commutes_with(g)) return false;
  return true;
}

}  // namespace detail

// Visits every phase +1 Pauli string with support size <= q (support inside
// `region` when given, commuting with every generator in `symmetry` when
// given), in a fixed deterministic order: support size ascending, support
// combination lexicographic, letters counted in base 3 (X < Y < Z). The
// visitor returns false to stop early.
template <class Visitor>
void for_each_q_local(int n_sites, int q, const std::optional<std::vector<int>>& region,
                      const std::vector<PauliString>* symmetry, Visitor&& visit) {
  if (q < 0) throw ArgumentError("q must be nonnegative");
  std::vector<int> sites;
  if (region) {
    sites = *region;
    std::sort(sites.begin(), sites.end());
    sites.erase(std::unique(sites.begin(), sites.end()), sites.end());
    for (int s : sites)
      if (s < 0 || s >= n_sites) throw ArgumentError("region site out of range");
  } else {
    sites.resize(n_sites);
    for (int i = 0; i < n_sites; ++i) sites[i] = i;
  }
  const int m = int(sites.size());
  const int qq = std::min(q, m);

  PauliString id = PauliString::identity(n_sites);
  if (detail::commutes_with_all(id, symmetry))
    if (!visit(id)) return;

  std::vector<int> comb;
  static const PauliLetter letters[3] = {PauliLetter::X, PauliLetter::Y, PauliLetter::Z};

  std::function<bool(int, int)> rec = [&](int start, int remaining) -> bool {
    if (remaining == 0) {
      const int s = int(comb.size());
      std::vector<int> digit(s, 0);
      while (true) {
        PauliString p(n_sites);
        for (int j = 0; j < s; ++j) p.set_letter(comb[j], letters[digit[j]]);
        if (detail::commutes_with_all(p, symmetry))
          if (!visit(p)) return false;
        int pos = s - 1;
        while (pos >= 0 && digit[pos] == 2) digit[pos--] = 0;
        if (pos < 0) break;
        ++digit[pos];
      }
      return true;
    }
    for (int i = start; i <= m - remaining; ++i) {
      comb.push_back(sites[i]);
      bool ok = rec(i + 1, remaining - 1);
      comb.pop_back();
      if (!ok) return false;
    }
    return true;
  };

  for (int s = 1; s <= qq; ++s)
    if (!rec(0, s)) return;
}

// Materialized q-local basis; throws DimensionLimitError above max_count.
inline std::vector<PauliString> enumerate_q_local_basis(
    int n_sites, int q, const std::optional<std::vector<int>>& region = std::nullopt,
    const std::vector<PauliString>* symmetry = nullptr, std::size_t max_count = 2000000) {
  int m = region ? int(region->size()) : n_sites;
  if (q_local_basis_count(std::min(m, n_sites), q) > double(max_count))
    throw DimensionLimitError("q-local basis too large to materialize");
  std::vector<PauliString> out;
  for_each_q_local(n_sites, q, region, symmetry, [&](const PauliString& p) {
    out.push_back(p);
    return true;
  });
  return out;
}

}  // namespace revlab
