#pragma once

#include <mpfr.h>

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "vcalg/errors.hpp"
#include "vcalg/rational.hpp"
#include "vcalg/roots.hpp"
#include "vcalg/unipoly.hpp"

namespace vcalg {

/// Closed interval [lo, hi] with exact rational endpoints.
struct RationalInterval {
  Rational lo;
  Rational hi;

  RationalInterval() = default;
  RationalInterval(Rational x) : lo(x), hi(std::move(x)) {}  // NOLINT(google-explicit-constructor)
  RationalInterval(Rational l, Rational h) : lo(std::move(l)), hi(std::move(h)) {
    if (hi < lo) std::swap(lo, hi);
  }
  static RationalInterval of(const RootInterval& r) { return {r.lo, r.hi}; }

  bool exact() const { return lo == hi; }
  bool contains(const Rational& x) const { return lo <= x && x <= hi; }
  bool positive() const { return lo > 0; }
  bool negative() const { return hi < 0; }
  Rational width() const { return hi - lo; }
  Rational midpoint() const { return (lo + hi) / 2; }
  double approx() const { return to_double(midpoint()); }

  friend RationalInterval operator+(const RationalInterval& a, const RationalInterval& b) {
    return {a.lo + b.lo, a.hi + b.hi};
  }
  friend RationalInterval operator-(const RationalInterval& a, const RationalInterval& b) {
    return {a.lo - b.hi, a.hi - b.lo};
  }
  friend RationalInterval operator-(const RationalInterval& a) { return {-a.hi, -a.lo}; }
  friend RationalInterval operator*(const RationalInterval& a, const RationalInterval& b) {
    if (a.exact() && b.exact()) return RationalInterval(a.lo * b.lo);
    Rational p[4] = {a.lo * b.lo, a.lo * b.hi, a.hi * b.lo, a.hi * b.hi};
    return {*std::min_element(p, p + 4), *std::max_element(p, p + 4)};
  }
  RationalInterval reciprocal() const {
    if (contains(0)) throw ContractViolation("reciprocal of an interval containing zero");
    return {1 / hi, 1 / lo};
  }
  friend RationalInterval operator/(const RationalInterval& a, const RationalInterval& b) {
    return a * b.reciprocal();
  }
};

/// Enclosure of { p(x) : x in iv } by interval Horner evaluation.
inline RationalInterval evaluate(const UniPoly& p, const RationalInterval& iv) {
  if (iv.exact()) return RationalInterval(p(iv.lo));
  RationalInterval acc(0);
  auto c = p.coeffs();
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * iv + RationalInterval(*it);
  return acc;
}

/// Fixed-precision MPFR float with value semantics.
class BigFloat {
 public:
  static constexpr mpfr_prec_t kPrecision = 256;

  BigFloat() { mpfr_init2(v_, kPrecision); mpfr_set_zero(v_, 1); }
  BigFloat(const BigFloat& o) { mpfr_init2(v_, kPrecision); mpfr_set(v_, o.v_, MPFR_RNDN); }
  BigFloat(BigFloat&& o) noexcept : BigFloat() { mpfr_swap(v_, o.v_); }
  BigFloat& operator=(const BigFloat& o) {
    if (this != &o) mpfr_set(v_, o.v_, MPFR_RNDN);
    return *this;
  }
  BigFloat& operator=(BigFloat&& o) noexcept {
    mpfr_swap(v_, o.v_);
    return *this;
  }
  ~BigFloat() { mpfr_clear(v_); }

  static BigFloat from(const Rational& q, mpfr_rnd_t rnd) {
    BigFloat r;
    mpfr_set_q(r.v_, q.get_mpq_t(), rnd);
    return r;
  }
  static BigFloat infinity(int sign_) {
    BigFloat r;
    mpfr_set_inf(r.v_, sign_);
    return r;
  }

  mpfr_ptr get() { return v_; }
  mpfr_srcptr get() const { return v_; }
  double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
  double to_double_up() const { return mpfr_get_d(v_, MPFR_RNDU); }

  /// Decimal string with `digits` significant digits.
  std::string to_string(int digits = 30) const {
    char* buf = nullptr;
    mpfr_asprintf(&buf, "%.*Rg", digits, v_);
    std::string s(buf);
    mpfr_free_str(buf);
    return s;
  }

  friend bool operator<(const BigFloat& a, const BigFloat& b) { return mpfr_less_p(a.v_, b.v_) != 0; }
  friend bool operator>(const BigFloat& a, const BigFloat& b) { return mpfr_greater_p(a.v_, b.v_) != 0; }

 private:
  mpfr_t v_;
};

/// Rigorous enclosure [lo, hi] of a real number, endpoints rounded outward.
struct RealEnclosure {
  BigFloat lo;
  BigFloat hi;

  static RealEnclosure of(const RationalInterval& iv) {
    return {BigFloat::from(iv.lo, MPFR_RNDD), BigFloat::from(iv.hi, MPFR_RNDU)};
  }

  double approx() const {
    BigFloat m;
    mpfr_add(m.get(), lo.get(), hi.get(), MPFR_RNDN);
    mpfr_div_2ui(m.get(), m.get(), 1, MPFR_RNDN);
    return m.to_double();
  }
  BigFloat midpoint() const {
    BigFloat m;
    mpfr_add(m.get(), lo.get(), hi.get(), MPFR_RNDN);
    mpfr_div_2ui(m.get(), m.get(), 1, MPFR_RNDN);
    return m;
  }

  /// True when every point of this enclosure exceeds every point of other.
  bool certainly_above(const RealEnclosure& other) const { return lo > other.hi; }

  RealEnclosure& operator+=(const RealEnclosure& o) {
    mpfr_add(lo.get(), lo.get(), o.lo.get(), MPFR_RNDD);
    mpfr_add(hi.get(), hi.get(), o.hi.get(), MPFR_RNDU);
    return *this;
  }

  /// Multiplies by an exact rational weight.
  RealEnclosure scaled(const Rational& w) const {
    RealEnclosure r;
    if (w >= 0) {
      mpfr_mul_q(r.lo.get(), lo.get(), w.get_mpq_t(), MPFR_RNDD);
      mpfr_mul_q(r.hi.get(), hi.get(), w.get_mpq_t(), MPFR_RNDU);
    } else {
      mpfr_mul_q(r.lo.get(), hi.get(), w.get_mpq_t(), MPFR_RNDD);
      mpfr_mul_q(r.hi.get(), lo.get(), w.get_mpq_t(), MPFR_RNDU);
    }
    return r;
  }
};

/// Upper bound, rounded up to double, on |x - center| over the interval.
inline double error_bound(const RationalInterval& iv, double center) {
  Rational c(center);
  Rational e = std::max(Rational(iv.hi - c), Rational(c - iv.lo));
  return BigFloat::from(e, MPFR_RNDU).to_double_up();
}

inline double error_bound(const RealEnclosure& enc, double center) {
  BigFloat c, up, down;
  mpfr_set_d(c.get(), center, MPFR_RNDN);
  mpfr_sub(up.get(), enc.hi.get(), c.get(), MPFR_RNDU);
  mpfr_sub(down.get(), c.get(), enc.lo.get(), MPFR_RNDU);
  return std::max(up.to_double_up(), down.to_double_up());
}

/// Enclosure of log(x) over a positive rational interval.
inline RealEnclosure log_enclosure(const RationalInterval& iv) {
  if (!iv.positive()) throw ContractViolation("logarithm of a non-positive interval");
  RealEnclosure r = RealEnclosure::of(iv);
  mpfr_log(r.lo.get(), r.lo.get(), MPFR_RNDD);
  mpfr_log(r.hi.get(), r.hi.get(), MPFR_RNDU);
  return r;
}

}  // namespace vcalg
