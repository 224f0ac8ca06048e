#pragma once

#include <gmpxx.h>

#include <cctype>
#include <cstdlib>
#include <string>
#include <string_view>

#include "vcalg/errors.hpp"

namespace vcalg {

using Integer = mpz_class;
using Rational = mpq_class;

inline int sign(const Rational& x) { return sgn(x); }
inline int sign(const Integer& x) { return sgn(x); }

/// Decimal "p/q" form, or "p" for integers.
inline std::string to_string(const Rational& x) { return x.get_str(); }
inline std::string to_string(const Integer& x) { return x.get_str(); }

inline Rational pow2(long k) {
  Rational r = 1;
  if (k >= 0) {
    mpq_mul_2exp(r.get_mpq_t(), r.get_mpq_t(), static_cast<mp_bitcnt_t>(k));
  } else {
    mpq_div_2exp(r.get_mpq_t(), r.get_mpq_t(), static_cast<mp_bitcnt_t>(-k));
  }
  return r;
}

inline Rational pow10(long k) {
  Integer p;
  mpz_ui_pow_ui(p.get_mpz_t(), 10, static_cast<unsigned long>(k < 0 ? -k : k));
  return k >= 0 ? Rational(p) : Rational(Integer(1), p);
}

/// Parses "p/q", an integer, or a decimal literal with optional exponent
/// ("-12.5e-3") into an exact rational.
inline Rational parse_rational(std::string_view text) {
  auto fail = [&]() -> Rational {
    throw InputError("not a rational number: '" + std::string(text) + "'");
  };
  std::size_t b = 0, e = text.size();
  while (b < e && std::isspace(static_cast<unsigned char>(text[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(text[e - 1]))) --e;
  std::string s(text.substr(b, e - b));
  if (s.empty()) return fail();

  if (auto slash = s.find('/'); slash != std::string::npos) {
    Integer p, q;
    std::string ps = s.substr(0, slash), qs = s.substr(slash + 1);
    if (!ps.empty() && ps[0] == '+') ps.erase(0, 1);
    if (ps.empty() || qs.empty() || p.set_str(ps, 10) != 0 || q.set_str(qs, 10) != 0) return fail();
    if (q == 0) throw InputError("zero denominator in '" + s + "'");
    Rational r(p, q);
    r.canonicalize();
    return r;
  }

  std::size_t i = 0;
  bool negative = false;
  if (s[i] == '+' || s[i] == '-') negative = s[i++] == '-';
  std::string digits;
  long scale = 0;
  bool seen_digit = false, seen_point = false;
  for (; i < s.size(); ++i) {
    char c = s[i];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      digits.push_back(c);
      seen_digit = true;
      if (seen_point) --scale;
    } else if (c == '.' && !seen_point) {
      seen_point = true;
    } else {
      break;
    }
  }
  if (!seen_digit) return fail();
  if (i < s.size()) {
    if (s[i] != 'e' && s[i] != 'E') return fail();
    std::string exp_text = s.substr(i + 1);
    if (exp_text.empty()) return fail();
    char* end = nullptr;
    long exponent = std::strtol(exp_text.c_str(), &end, 10);
    if (*end != '\0') return fail();
    scale += exponent;
  }
  Integer mantissa(digits, 10);
  Rational r = Rational(mantissa) * pow10(scale);
  r.canonicalize();
  return negative ? Rational(-r) : r;
}

inline double to_double(const Rational& x) { return mpq_get_d(x.get_mpq_t()); }

}  // namespace vcalg
