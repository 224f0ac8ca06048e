#pragma once

#include <algorithm>
#include <initializer_list>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "vcalg/errors.hpp"
#include "vcalg/rational.hpp"

namespace vcalg {

/// Dense univariate polynomial over the rationals, coefficients stored in
/// ascending degree. The zero polynomial has no coefficients and degree -1.
class UniPoly {
 public:
  UniPoly() = default;
  explicit UniPoly(std::vector<Rational> coeffs, std::string var = "theta")
      : coeffs_(std::move(coeffs)), var_(std::move(var)) {
    trim();
  }
  UniPoly(std::initializer_list<Rational> coeffs, std::string var = "theta")
      : coeffs_(coeffs), var_(std::move(var)) {
    trim();
  }

  static UniPoly constant(const Rational& c, std::string var = "theta") {
    return UniPoly(std::vector<Rational>{c}, std::move(var));
  }
  /// c0 + c1 * x
  static UniPoly linear(const Rational& c0, const Rational& c1, std::string var = "theta") {
    return UniPoly(std::vector<Rational>{c0, c1}, std::move(var));
  }
  static UniPoly monomial(const Rational& c, int k, std::string var = "theta") {
    std::vector<Rational> v(static_cast<std::size_t>(k) + 1);
    v.back() = c;
    return UniPoly(std::move(v), std::move(var));
  }

  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  bool is_zero() const { return coeffs_.empty(); }
  bool is_constant() const { return coeffs_.size() <= 1; }
  const std::string& var() const { return var_; }
  void set_var(std::string v) { var_ = std::move(v); }

  std::span<const Rational> coeffs() const { return coeffs_; }
  Rational coeff(int k) const {
    return k >= 0 && k <= degree() ? coeffs_[static_cast<std::size_t>(k)] : Rational(0);
  }
  const Rational& lead() const {
    if (coeffs_.empty()) throw UndefinedInputError("leading coefficient of the zero polynomial");
    return coeffs_.back();
  }

  Rational operator()(const Rational& x) const {
    Rational acc = 0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + *it;
    return acc;
  }

  UniPoly derivative() const {
    std::vector<Rational> out;
    for (std::size_t k = 1; k < coeffs_.size(); ++k) out.push_back(coeffs_[k] * static_cast<long>(k));
    return UniPoly(std::move(out), var_);
  }

  UniPoly operator-() const {
    UniPoly r = *this;
    for (auto& c : r.coeffs_) c = -c;
    return r;
  }

  UniPoly& operator+=(const UniPoly& o) {
    if (coeffs_.size() < o.coeffs_.size()) coeffs_.resize(o.coeffs_.size());
    for (std::size_t k = 0; k < o.coeffs_.size(); ++k) coeffs_[k] += o.coeffs_[k];
    trim();
    return *this;
  }
  UniPoly& operator-=(const UniPoly& o) {
    if (coeffs_.size() < o.coeffs_.size()) coeffs_.resize(o.coeffs_.size());
    for (std::size_t k = 0; k < o.coeffs_.size(); ++k) coeffs_[k] -= o.coeffs_[k];
    trim();
    return *this;
  }
  UniPoly& operator*=(const Rational& s) {
    if (s == 0) {
      coeffs_.clear();
      return *this;
    }
    for (auto& c : coeffs_) c *= s;
    return *this;
  }
  UniPoly& operator*=(const UniPoly& o) {
    *this = *this * o;
    return *this;
  }

  friend UniPoly operator+(UniPoly a, const UniPoly& b) { return a += b; }
  friend UniPoly operator-(UniPoly a, const UniPoly& b) { return a -= b; }
  friend UniPoly operator*(UniPoly a, const Rational& s) { return a *= s; }
  friend UniPoly operator*(const Rational& s, UniPoly a) { return a *= s; }
  friend UniPoly operator*(const UniPoly& a, const UniPoly& b) {
    if (a.is_zero() || b.is_zero()) return UniPoly(std::vector<Rational>{}, a.var_);
    std::vector<Rational> out(a.coeffs_.size() + b.coeffs_.size() - 1);
    for (std::size_t i = 0; i < a.coeffs_.size(); ++i) {
      if (a.coeffs_[i] == 0) continue;
      for (std::size_t j = 0; j < b.coeffs_.size(); ++j) out[i + j] += a.coeffs_[i] * b.coeffs_[j];
    }
    return UniPoly(std::move(out), a.var_);
  }

  friend bool operator==(const UniPoly& a, const UniPoly& b) { return a.coeffs_ == b.coeffs_; }

  friend std::ostream& operator<<(std::ostream& os, const UniPoly& p) {
    if (p.is_zero()) return os << "0";
    bool first = true;
    for (int k = p.degree(); k >= 0; --k) {
      const Rational& c = p.coeffs_[static_cast<std::size_t>(k)];
      if (c == 0) continue;
      if (!first) os << (c < 0 ? " - " : " + ");
      else if (c < 0) os << "-";
      Rational a = abs(c);
      if (a != 1 || k == 0) os << a;
      if (k > 0) os << p.var_;
      if (k > 1) os << "^" << k;
      first = false;
    }
    return os;
  }

 private:
  void trim() {
    while (!coeffs_.empty() && coeffs_.back() == 0) coeffs_.pop_back();
  }

  std::vector<Rational> coeffs_;
  std::string var_ = "theta";
};

inline bool is_zero(const UniPoly& p) { return p.is_zero(); }

inline UniPoly pow(const UniPoly& p, int k) {
  UniPoly r = UniPoly::constant(1, p.var());
  for (int i = 0; i < k; ++i) r *= p;
  return r;
}

struct DivMod {
  UniPoly quotient;
  UniPoly remainder;
};

/// Euclidean division over Q.
inline DivMod divmod(const UniPoly& p, const UniPoly& q) {
  if (q.is_zero()) throw UndefinedInputError("division by the zero polynomial");
  std::vector<Rational> rem(p.coeffs().begin(), p.coeffs().end());
  int dq = q.degree();
  int dp = p.degree();
  std::vector<Rational> quo(dp >= dq ? static_cast<std::size_t>(dp - dq + 1) : 0);
  Rational inv_lead = 1 / q.lead();
  for (int k = dp; k >= dq; --k) {
    const Rational c = rem[static_cast<std::size_t>(k)] * inv_lead;
    if (c == 0) continue;
    quo[static_cast<std::size_t>(k - dq)] = c;
    for (int j = 0; j <= dq; ++j) rem[static_cast<std::size_t>(k - dq + j)] -= c * q.coeff(j);
  }
  return {UniPoly(std::move(quo), p.var()), UniPoly(std::move(rem), p.var())};
}

inline bool divides(const UniPoly& q, const UniPoly& p) { return divmod(p, q).remainder.is_zero(); }

/// Quotient p / q; throws DivisibilityError when q does not divide p.
inline UniPoly exact_divide(const UniPoly& p, const UniPoly& q) {
  if (q.is_zero()) throw UndefinedInputError("exact division by the zero polynomial");
  auto [quo, rem] = divmod(p, q);
  if (!rem.is_zero()) throw DivisibilityError("polynomial division is not exact");
  return quo;
}

namespace detail {

/// Integer polynomial, ascending coefficients, no trailing zeros.
using ZPoly = std::vector<Integer>;

inline void ztrim(ZPoly& p) {
  while (!p.empty() && p.back() == 0) p.pop_back();
}

inline int zdeg(const ZPoly& p) { return static_cast<int>(p.size()) - 1; }

inline Integer zcontent(const ZPoly& p) {
  Integer g = 0;
  for (const auto& c : p) {
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), c.get_mpz_t());
    if (g == 1) break;
  }
  return g;
}

/// Divides by the (positive) content; sign is preserved.
inline void zprimitive_inplace(ZPoly& p) {
  Integer g = zcontent(p);
  if (g > 1) {
    for (auto& c : p) mpz_divexact(c.get_mpz_t(), c.get_mpz_t(), g.get_mpz_t());
  }
}

/// Scales p by a positive rational to a coprime integer polynomial.
inline ZPoly to_zpoly(const UniPoly& p) {
  Integer l = 1;
  for (const auto& c : p.coeffs()) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), c.get_den_mpz_t());
  ZPoly out;
  out.reserve(p.coeffs().size());
  for (const auto& c : p.coeffs()) {
    Integer v = c.get_num() * (l / c.get_den());
    out.push_back(std::move(v));
  }
  zprimitive_inplace(out);
  return out;
}

inline UniPoly from_zpoly(const ZPoly& p, const std::string& var) {
  std::vector<Rational> c(p.begin(), p.end());
  return UniPoly(std::move(c), var);
}

/// lc(b)^(deg a - deg b + 1) * a  mod  b, computed over Z.
inline ZPoly zprem(ZPoly a, const ZPoly& b) {
  int db = zdeg(b);
  int da = zdeg(a);
  if (da < db) return a;
  const Integer& lb = b.back();
  for (int k = da - db; k >= 0; --k) {
    Integer top = a[static_cast<std::size_t>(k + db)];
    for (auto& c : a) c *= lb;
    if (top != 0) {
      for (int j = 0; j <= db; ++j) a[static_cast<std::size_t>(k + j)] -= top * b[static_cast<std::size_t>(j)];
    }
  }
  ztrim(a);
  return a;
}

/// Sign of p(x) for rational x, by homogeneous Horner evaluation over Z.
inline int zsign_at(const ZPoly& p, const Rational& x) {
  if (p.empty()) return 0;
  const Integer& u = x.get_num();
  const Integer& v = x.get_den();
  int n = zdeg(p);
  Integer acc = p.back();
  Integer vpow = 1;
  for (int i = n - 1; i >= 0; --i) {
    vpow *= v;
    acc *= u;
    acc += p[static_cast<std::size_t>(i)] * vpow;
  }
  return sgn(acc);
}

}  // namespace detail

/// Positive rational c such that p / c has coprime integer coefficients.
inline Rational content(const UniPoly& p) {
  if (p.is_zero()) return 1;
  Integer l = 1, g = 0;
  for (const auto& c : p.coeffs()) {
    mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), c.get_den_mpz_t());
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), c.get_num_mpz_t());
  }
  Rational r(g, l);
  r.canonicalize();
  return r;
}

/// Divides by the positive content: coprime integer coefficients, sign kept.
inline UniPoly primitive_preserving_sign(const UniPoly& p) {
  if (p.is_zero()) return p;
  return detail::from_zpoly(detail::to_zpoly(p), p.var());
}

/// Primitive normal form: coprime integer coefficients, positive leading
/// coefficient. Unique representative of the class of nonzero rational
/// multiples of p.
inline UniPoly primitive_part(const UniPoly& p) {
  if (p.is_zero()) return p;
  UniPoly r = primitive_preserving_sign(p);
  return r.lead() < 0 ? -r : r;
}

/// Greatest common divisor in primitive normal form, computed with a
/// primitive pseudo-remainder sequence over Z.
inline UniPoly poly_gcd(const UniPoly& p, const UniPoly& q) {
  if (p.is_zero() && q.is_zero()) throw UndefinedInputError("gcd of two zero polynomials");
  if (p.is_zero()) return primitive_part(q);
  if (q.is_zero()) return primitive_part(p);
  detail::ZPoly a = detail::to_zpoly(p);
  detail::ZPoly b = detail::to_zpoly(q);
  if (a.size() < b.size()) std::swap(a, b);
  while (!b.empty()) {
    detail::ZPoly r = detail::zprem(a, b);
    detail::zprimitive_inplace(r);
    a = std::move(b);
    b = std::move(r);
  }
  return primitive_part(detail::from_zpoly(a, p.var()));
}

/// p / gcd(p, p'), in primitive normal form.
inline UniPoly squarefree_part(const UniPoly& p) {
  if (p.is_zero()) throw UndefinedInputError("squarefree part of the zero polynomial");
  if (p.degree() == 0) return UniPoly::constant(1, p.var());
  return primitive_part(exact_divide(p, poly_gcd(p, p.derivative())));
}

/// Number of sign alternations in the nonzero coefficient sequence.
inline int descartes_sign_changes(const UniPoly& p) {
  if (p.is_zero()) throw UndefinedInputError("sign changes of the zero polynomial");
  int changes = 0, last = 0;
  for (const auto& c : p.coeffs()) {
    int s = sgn(c);
    if (s == 0) continue;
    if (last != 0 && s != last) ++changes;
    last = s;
  }
  return changes;
}

inline int sign_at(const UniPoly& p, const Rational& x) {
  if (p.is_zero()) return 0;
  return detail::zsign_at(detail::to_zpoly(p), x);
}

/// Multiplicative inverse of a modulo m over Q; throws DivisibilityError if
/// gcd(a, m) is not constant.
inline UniPoly inverse_mod(const UniPoly& a, const UniPoly& m) {
  if (m.degree() < 1) throw UndefinedInputError("modulus must have positive degree");
  UniPoly r0 = m, r1 = divmod(a, m).remainder;
  UniPoly s0(std::vector<Rational>{}, m.var()), s1 = UniPoly::constant(1, m.var());
  while (!r1.is_zero()) {
    auto [quo, rem] = divmod(r0, r1);
    UniPoly s2 = s0 - quo * s1;
    r0 = std::move(r1);
    r1 = std::move(rem);
    s0 = std::move(s1);
    s1 = std::move(s2);
  }
  if (r0.degree() != 0) throw DivisibilityError("polynomial is not invertible modulo the given modulus");
  return divmod(s0 * (1 / r0.lead()), m).remainder;
}

}  // namespace vcalg
