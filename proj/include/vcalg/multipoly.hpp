#pragma once

#include <array>
#include <functional>
#include <map>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "vcalg/bareiss.hpp"
#include "vcalg/errors.hpp"
#include "vcalg/rational.hpp"
#include "vcalg/unipoly.hpp"

namespace vcalg {

using Exponent = std::array<int, 3>;
using VariableTags = std::array<std::string, 3>;

/// Sparse polynomial in three variables over Q. Terms are kept in
/// descending lexicographic order of exponents (variable 0 most significant)
/// and zero coefficients are never stored.
class MultiPoly {
 public:
  using TermMap = std::map<Exponent, Rational, std::greater<>>;

  MultiPoly() = default;
  explicit MultiPoly(VariableTags vars) : vars_(std::move(vars)) {}

  static MultiPoly constant(const Rational& c, VariableTags vars = default_tags()) {
    MultiPoly p(std::move(vars));
    p.add_term({0, 0, 0}, c);
    return p;
  }
  static MultiPoly variable(int i, VariableTags vars = default_tags()) {
    MultiPoly p(std::move(vars));
    Exponent e{0, 0, 0};
    e[static_cast<std::size_t>(i)] = 1;
    p.add_term(e, 1);
    return p;
  }
  static MultiPoly monomial(const Exponent& e, const Rational& c, VariableTags vars = default_tags()) {
    MultiPoly p(std::move(vars));
    p.add_term(e, c);
    return p;
  }
  /// Embeds a univariate polynomial as a polynomial in variable i.
  static MultiPoly from_unipoly(const UniPoly& u, int i, VariableTags vars = default_tags()) {
    MultiPoly p(std::move(vars));
    for (int k = 0; k <= u.degree(); ++k) {
      Exponent e{0, 0, 0};
      e[static_cast<std::size_t>(i)] = k;
      p.add_term(e, u.coeff(k));
    }
    return p;
  }

  static VariableTags default_tags() { return {"x", "y", "z"}; }

  const TermMap& terms() const { return terms_; }
  const VariableTags& vars() const { return vars_; }
  bool is_zero() const { return terms_.empty(); }

  int index_of(std::string_view name) const {
    for (int i = 0; i < 3; ++i) {
      if (vars_[static_cast<std::size_t>(i)] == name) return i;
    }
    throw ContractViolation("unknown variable '" + std::string(name) + "'");
  }

  int degree_in(int i) const {
    int d = -1;
    for (const auto& [e, c] : terms_) d = std::max(d, e[static_cast<std::size_t>(i)]);
    return d;
  }
  int total_degree() const {
    int d = -1;
    for (const auto& [e, c] : terms_) d = std::max(d, e[0] + e[1] + e[2]);
    return d;
  }
  bool depends_on(int i) const { return degree_in(i) > 0; }

  /// Coefficient of var_i^k, a polynomial free of variable i.
  MultiPoly coefficient_in(int i, int k) const {
    MultiPoly out(vars_);
    for (const auto& [e, c] : terms_) {
      if (e[static_cast<std::size_t>(i)] != k) continue;
      Exponent f = e;
      f[static_cast<std::size_t>(i)] = 0;
      out.add_term(f, c);
    }
    return out;
  }

  /// Substitutes variable i := value.
  MultiPoly substitute(int i, const Rational& value) const {
    MultiPoly out(vars_);
    for (const auto& [e, c] : terms_) {
      Exponent f = e;
      Rational v = c;
      for (int k = 0; k < e[static_cast<std::size_t>(i)]; ++k) v *= value;
      f[static_cast<std::size_t>(i)] = 0;
      out.add_term(f, v);
    }
    return out;
  }

  Rational evaluate(const std::array<Rational, 3>& x) const {
    Rational sum = 0;
    for (const auto& [e, c] : terms_) {
      Rational t = c;
      for (std::size_t i = 0; i < 3; ++i) {
        for (int k = 0; k < e[i]; ++k) t *= x[i];
      }
      sum += t;
    }
    return sum;
  }

  /// Requires that no variable other than i occurs.
  UniPoly to_unipoly(int i) const {
    std::vector<Rational> c(static_cast<std::size_t>(std::max(degree_in(i), 0)) + 1);
    for (const auto& [e, v] : terms_) {
      for (int j = 0; j < 3; ++j) {
        if (j != i && e[static_cast<std::size_t>(j)] != 0) {
          throw ContractViolation("polynomial depends on more than variable " + vars_[static_cast<std::size_t>(i)]);
        }
      }
      c[static_cast<std::size_t>(e[static_cast<std::size_t>(i)])] = v;
    }
    return UniPoly(std::move(c), vars_[static_cast<std::size_t>(i)]);
  }

  MultiPoly operator-() const {
    MultiPoly r = *this;
    for (auto& [e, c] : r.terms_) c = -c;
    return r;
  }
  MultiPoly& operator+=(const MultiPoly& o) {
    for (const auto& [e, c] : o.terms_) add_term(e, c);
    return *this;
  }
  MultiPoly& operator-=(const MultiPoly& o) {
    for (const auto& [e, c] : o.terms_) add_term(e, -c);
    return *this;
  }
  MultiPoly& operator*=(const Rational& s) {
    if (s == 0) {
      terms_.clear();
      return *this;
    }
    for (auto& [e, c] : terms_) c *= s;
    return *this;
  }

  friend MultiPoly operator+(MultiPoly a, const MultiPoly& b) { return a += b; }
  friend MultiPoly operator-(MultiPoly a, const MultiPoly& b) { return a -= b; }
  friend MultiPoly operator*(MultiPoly a, const Rational& s) { return a *= s; }
  friend MultiPoly operator*(const Rational& s, MultiPoly a) { return a *= s; }
  friend MultiPoly operator*(const MultiPoly& a, const MultiPoly& b) {
    MultiPoly out(a.vars_);
    for (const auto& [ea, ca] : a.terms_) {
      for (const auto& [eb, cb] : b.terms_) {
        out.add_term({ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2]}, ca * cb);
      }
    }
    return out;
  }
  MultiPoly& operator*=(const MultiPoly& o) { return *this = *this * o; }

  friend bool operator==(const MultiPoly& a, const MultiPoly& b) { return a.terms_ == b.terms_; }

  friend std::ostream& operator<<(std::ostream& os, const MultiPoly& p) {
    if (p.is_zero()) return os << "0";
    bool first = true;
    for (const auto& [e, c] : p.terms_) {
      os << (first ? (c < 0 ? "-" : "") : (c < 0 ? " - " : " + "));
      Rational a = abs(c);
      bool unit = e == Exponent{0, 0, 0};
      if (a != 1 || unit) os << a;
      for (std::size_t i = 0; i < 3; ++i) {
        if (e[i] == 0) continue;
        os << (a != 1 ? "*" : "") << p.vars_[i];
        if (e[i] > 1) os << "^" << e[i];
        a = 0;  // subsequent factors need the separator
      }
      first = false;
    }
    return os;
  }

  void add_term(const Exponent& e, const Rational& c) {
    if (c == 0) return;
    auto [it, inserted] = terms_.try_emplace(e, c);
    if (!inserted) {
      it->second += c;
      if (it->second == 0) terms_.erase(it);
    }
  }

 private:
  TermMap terms_;
  VariableTags vars_ = default_tags();
};

inline bool is_zero(const MultiPoly& p) { return p.is_zero(); }

inline MultiPoly pow(const MultiPoly& p, int k) {
  MultiPoly r = MultiPoly::constant(1, p.vars());
  for (int i = 0; i < k; ++i) r *= p;
  return r;
}

/// Quotient p / q by lexicographic division; throws DivisibilityError when
/// the division leaves a remainder.
inline MultiPoly exact_divide(const MultiPoly& p, const MultiPoly& q) {
  if (q.is_zero()) throw UndefinedInputError("exact division by the zero multivariate polynomial");
  MultiPoly quotient(p.vars());
  MultiPoly rem = p;
  const auto& [lead_e, lead_c] = *q.terms().begin();
  while (!rem.is_zero()) {
    const auto& [e, c] = *rem.terms().begin();
    Exponent shift{};
    for (std::size_t i = 0; i < 3; ++i) {
      shift[i] = e[i] - lead_e[i];
      if (shift[i] < 0) throw DivisibilityError("multivariate division is not exact");
    }
    MultiPoly t = MultiPoly::monomial(shift, c / lead_c, p.vars());
    quotient += t;
    rem -= t * q;
  }
  return quotient;
}

/// Positive rational c with p / c having coprime integer coefficients.
inline Rational content(const MultiPoly& p) {
  if (p.is_zero()) return 1;
  Integer l = 1, g = 0;
  for (const auto& [e, c] : p.terms()) {
    mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), c.get_den_mpz_t());
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), c.get_num_mpz_t());
  }
  Rational r(g, l);
  r.canonicalize();
  return r;
}

/// p divided by its positive content (sign preserved).
inline MultiPoly primitive_preserving_sign(const MultiPoly& p) {
  if (p.is_zero()) return p;
  return p * (1 / content(p));
}

/// Sylvester matrix of p and q viewed as polynomials in variable i.
inline Matrix<MultiPoly> sylvester_matrix(const MultiPoly& p, const MultiPoly& q, int i) {
  int m = p.degree_in(i), n = q.degree_in(i);
  const std::size_t size = static_cast<std::size_t>(m + n);
  MultiPoly zero(p.vars());
  Matrix<MultiPoly> s(size, std::vector<MultiPoly>(size, zero));
  for (int r = 0; r < n; ++r) {
    for (int k = 0; k <= m; ++k) s[static_cast<std::size_t>(r)][static_cast<std::size_t>(r + m - k)] = p.coefficient_in(i, k);
  }
  for (int r = 0; r < m; ++r) {
    for (int k = 0; k <= n; ++k) {
      s[static_cast<std::size_t>(n + r)][static_cast<std::size_t>(r + n - k)] = q.coefficient_in(i, k);
    }
  }
  return s;
}

/// Sylvester resultant of p and q with respect to variable i.
inline MultiPoly resultant_eliminate(const MultiPoly& p, const MultiPoly& q, int i) {
  if (p.degree_in(i) < 1 || q.degree_in(i) < 1) {
    throw ContractViolation("resultant requires positive degree in variable " + p.vars()[static_cast<std::size_t>(i)]);
  }
  return bareiss_determinant(sylvester_matrix(p, q, i));
}

inline MultiPoly resultant_eliminate(const MultiPoly& p, const MultiPoly& q, std::string_view var) {
  return resultant_eliminate(p, q, p.index_of(var));
}

/// lc_i(q)^(deg_i p - deg_i q + 1) * p  mod  q, as polynomials in variable i.
inline MultiPoly pseudo_remainder(const MultiPoly& p, const MultiPoly& q, int i) {
  int dq = q.degree_in(i);
  if (dq < 0) throw UndefinedInputError("pseudo-remainder by zero");
  MultiPoly lead = q.coefficient_in(i, dq);
  MultiPoly r = p;
  Exponent unit{0, 0, 0};
  for (int dr = r.degree_in(i); dr >= dq && !r.is_zero(); dr = r.degree_in(i)) {
    MultiPoly top = r.coefficient_in(i, dr);
    Exponent shift = unit;
    shift[static_cast<std::size_t>(i)] = dr - dq;
    r = lead * r - top * MultiPoly::monomial(shift, 1, p.vars()) * q;
  }
  return r;
}

}  // namespace vcalg
