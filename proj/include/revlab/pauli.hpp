#pragma once

#include <bit>
#include <complex>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "revlab/errors.hpp"

namespace revlab {

using complexd = std::complex<double>;

enum class PauliLetter : unsigned char { I = 0, X = 1, Y = 2, Z = 3 };

inline char letter_char(PauliLetter l) { return "IXYZ"[static_cast<int>(l)]; }

// Signed/phased tensor product of single-site Pauli letters.
//
// Internal form: i^t * X^x * Z^z with x, z site bitmasks (site 0 = bit 0) and
// per-site X-before-Z ordering; Y on a site is stored as i*(XZ). The letter
// form shown to callers carries the phase i^(t - |x&z|), one of {1,-1,i,-i}.
class PauliString {
 public:
  PauliString() = default;

  explicit PauliString(int n_sites) : n_(check_n(n_sites)) {}

  static PauliString identity(int n_sites) { return PauliString(n_sites); }

  static PauliString single(int n_sites, int site, PauliLetter l) {
    PauliString p(n_sites);
    p.set_letter(site, l);
    return p;
  }

  // Raw symplectic constructor; t is the internal phase exponent of i^t X^x Z^z.
  static PauliString from_masks(int n_sites, std::uint64_t x, std::uint64_t z, int t = 0) {
    PauliString p(n_sites);
    if (n_sites < 64 && ((x | z) >> n_sites) != 0)
      throw ArgumentError("pauli mask exceeds site count");
    p.x_ = x;
    p.z_ = z;
    p.t_ = ((t % 4) + 4) % 4;
    return p;
  }

  int n_sites() const { return n_; }
  std::uint64_t xmask() const { return x_; }
  std::uint64_t zmask() const { return z_; }
  int phase_exponent() const { return t_; }

  std::uint64_t support_mask() const { return x_ | z_; }
  int support_size() const { return std::popcount(support_mask()); }

  std::vector<int> support() const {
    std::vector<int> s;
    std::uint64_t m = support_mask();
    while (m) {
      s.push_back(std::countr_zero(m));
      m &= m - 1;
    }
    return s;
  }

  bool identity_letters() const { return x_ == 0 && z_ == 0; }

  PauliLetter letter(int site) const {
    bool bx = (x_ >> site) & 1u, bz = (z_ >> site) & 1u;
    if (bx && bz) return PauliLetter::Y;
    if (bx) return PauliLetter::X;
    if (bz) return PauliLetter::Z;
    return PauliLetter::I;
  }

  void set_letter(int site, PauliLetter l) {
    if (site < 0 || site >= n_) throw ArgumentError("site out of range");
    std::uint64_t bit = std::uint64_t(1) << site;
    // clear, removing a previous Y's internal i
    if ((x_ & bit) && (z_ & bit)) t_ = (t_ + 3) % 4;
    x_ &= ~bit;
    z_ &= ~bit;
    switch (l) {
      case PauliLetter::I: break;
      case PauliLetter::X: x_ |= bit; break;
      case PauliLetter::Z: z_ |= bit; break;
      case PauliLetter::Y:
        x_ |= bit;
        z_ |= bit;
        t_ = (t_ + 1) % 4;  // Y = i X Z
        break;
    }
  }

  // Phase of the letter form: i^(t - #Y), one of {1,-1,i,-i}.
  complexd phase() const { return ipow(t_ - y_count()); }

  int y_count() const { return std::popcount(x_ & z_); }

  void multiply_phase_exponent(int dt) { t_ = ((t_ + dt) % 4 + 4) % 4; }

  // letter form with phase +1, keeping the letters
  PauliString bare() const {
    PauliString p = *this;
    p.t_ = p.y_count() % 4;
    return p;
  }

  bool same_letters(const PauliString& o) const {
    return n_ == o.n_ && x_ == o.x_ && z_ == o.z_;
  }

  bool operator==(const PauliString& o) const {
    return same_letters(o) && t_ == o.t_;
  }

  bool commutes_with(const PauliString& o) const {
    if (n_ != o.n_) throw DimensionError("pauli size mismatch");
    int anti = std::popcount(x_ & o.z_) + std::popcount(z_ & o.x_);
    return (anti % 2) == 0;
  }

  PauliString adjoint() const {
    PauliString p = *this;
    p.t_ = ((-t_ + 2 * y_count()) % 4 + 4) % 4;
    return p;
  }

  // Group product: (i^ta X^xa Z^za)(i^tb X^xb Z^zb), Z^za past X^xb picks up
  // (-1)^(za & xb).
  friend PauliString compose(const PauliString& a, const PauliString& b) {
    if (a.n_ != b.n_) throw DimensionError("pauli size mismatch");
    PauliString p(a.n_);
    p.x_ = a.x_ ^ b.x_;
    p.z_ = a.z_ ^ b.z_;
    p.t_ = (a.t_ + b.t_ + 2 * std::popcount(a.z_ & b.x_)) % 4;
    return p;
  }

  friend PauliString operator*(const PauliString& a, const PauliString& b) {
    return compose(a, b);
  }

  std::string str() const {
    static const char* phases[4] = {"+1", "+i", "-1", "-i"};
    std::string out = phases[((t_ - y_count()) % 4 + 4) % 4];
    if (identity_letters()) return out + " I";
    for (int s = 0; s < n_; ++s) {
      PauliLetter l = letter(s);
      if (l == PauliLetter::I) continue;
      out += ' ';
      out += letter_char(l);
      out += std::to_string(s);
    }
    return out;
  }

  // Parses "<phase> L<site> L<site> ..." with optional phase token in
  // {+1,-1,+i,-i}; "I" alone (or nothing after the phase) is identity.
  static PauliString parse(const std::string& text, int n_sites) {
    PauliString p(n_sites);
    std::istringstream in(text);
    std::string tok;
    bool first = true;
    while (in >> tok) {
      if (first) {
        first = false;
        if (tok == "+1") { continue; }
        if (tok == "-1") { p.t_ = 2; continue; }
        if (tok == "+i") { p.t_ = 1; continue; }
        if (tok == "-i") { p.t_ = 3; continue; }
      }
      if (tok == "I") continue;
      if (tok.size() < 2) throw ArgumentError("bad pauli token: " + tok);
      PauliLetter l;
      switch (tok[0]) {
        case 'X': l = PauliLetter::X; break;
        case 'Y': l = PauliLetter::Y; break;
        case 'Z': l = PauliLetter::Z; break;
        case 'I': l = PauliLetter::I; break;
        default: throw ArgumentError("bad pauli token: " + tok);
      }
      int site = 0;
      try {
        site = std::stoi(tok.substr(1));
      } catch (...) {
        throw ArgumentError("bad pauli token: " + tok);
      }
      if (site < 0 || site >= n_sites) throw ArgumentError("site out of range in: " + tok);
      if (p.letter(site) != PauliLetter::I) throw ArgumentError("repeated site in: " + tok);
      p.set_letter(site, l);
    }
    return p;
  }

  static complexd ipow(int t) {
    switch (((t % 4) + 4) % 4) {
      case 0: return {1.0, 0.0};
      case 1: return {0.0, 1.0};
      case 2: return {-1.0, 0.0};
      default: return {0.0, -1.0};
    }
  }

 private:
  static int check_n(int n) {
    if (n < 1 || n > 64) throw ArgumentError("site count must be in [1, 64]");
    return n;
  }

  int n_ = 0;
  std::uint64_t x_ = 0;
  std::uint64_t z_ = 0;
  int t_ = 0;
};

}  // namespace revlab
