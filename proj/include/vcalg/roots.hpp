#pragma once

#include <algorithm>
#include <vector>

#include "vcalg/errors.hpp"
#include "vcalg/rational.hpp"
#include "vcalg/unipoly.hpp"

namespace vcalg {

/// Isolating interval (lo, hi) holding exactly one real root of a squarefree
/// polynomial. lo == hi marks a root found exactly at a rational point; in
/// that case both signs are 0.
struct RootInterval {
  Rational lo;
  Rational hi;
  int poly_degree = 0;
  int sign_left = 0;
  int sign_right = 0;

  bool exact() const { return lo == hi; }
  Rational width() const { return hi - lo; }
  Rational midpoint() const { return (lo + hi) / 2; }
  double approx() const { return to_double(midpoint()); }

  static RootInterval point(const Rational& x, int degree) { return {x, x, degree, 0, 0}; }
};

enum class RootDomain { all, nonnegative };

/// Sturm sequence of a squarefree integer polynomial. variations(a) -
/// variations(b) counts the distinct real roots in (a, b].
class SturmSequence {
 public:
  explicit SturmSequence(const detail::ZPoly& p) {
    seq_.push_back(p);
    if (detail::zdeg(p) < 1) return;
    detail::ZPoly dp;
    for (std::size_t k = 1; k < p.size(); ++k) dp.push_back(p[k] * static_cast<long>(k));
    detail::zprimitive_inplace(dp);
    seq_.push_back(std::move(dp));
    while (detail::zdeg(seq_.back()) > 0) {
      const auto& a = seq_[seq_.size() - 2];
      const auto& b = seq_.back();
      detail::ZPoly r = detail::zprem(a, b);
      if (r.empty()) break;
      int power = detail::zdeg(a) - detail::zdeg(b) + 1;
      bool flipped = b.back() < 0 && power % 2 == 1;
      detail::zprimitive_inplace(r);
      if (!flipped) {
        for (auto& c : r) c = -c;
      }
      seq_.push_back(std::move(r));
    }
  }

  int variations_at(const Rational& x) const {
    int count = 0, last = 0;
    for (const auto& s : seq_) {
      int v = detail::zsign_at(s, x);
      if (v == 0) continue;
      if (last != 0 && v != last) ++count;
      last = v;
    }
    return count;
  }

  int variations_at_infinity(bool positive) const {
    int count = 0, last = 0;
    for (const auto& s : seq_) {
      int v = sgn(s.back());
      if (!positive && detail::zdeg(s) % 2 == 1) v = -v;
      if (last != 0 && v != last) ++count;
      last = v;
    }
    return count;
  }

  /// Number of distinct roots in (a, b], a < b.
  int count_half_open(const Rational& a, const Rational& b) const {
    return variations_at(a) - variations_at(b);
  }

  std::size_t length() const { return seq_.size(); }

 private:
  std::vector<detail::ZPoly> seq_;
};

/// Certified real-root isolation and refinement for one polynomial. The
/// input is reduced to its squarefree part once at construction.
class RootIsolator {
 public:
  explicit RootIsolator(const UniPoly& p)
      : sqf_(checked_squarefree(p)), z_(detail::to_zpoly(sqf_)), sturm_(z_) {}

  const UniPoly& squarefree() const { return sqf_; }
  int sign_at(const Rational& x) const { return detail::zsign_at(z_, x); }

  /// Distinct roots in the open interval (a, b), a < b.
  int count_open(const Rational& a, const Rational& b) const {
    return sturm_.count_half_open(a, b) - (sign_at(b) == 0 ? 1 : 0);
  }

  std::vector<RootInterval> isolate(RootDomain domain) const {
    std::vector<RootInterval> out;
    if (sqf_.degree() < 1) return out;
    Rational bound = root_bound();
    Rational lo = domain == RootDomain::all ? Rational(-bound) : Rational(0);
    if (domain == RootDomain::nonnegative && sign_at(0) == 0) out.push_back(RootInterval::point(0, sqf_.degree()));
    // lo is either -bound (never a root) or 0; roots in (lo, bound)
    bisect(lo, bound, count_open(lo, bound), out);
    std::sort(out.begin(), out.end(), [](const RootInterval& a, const RootInterval& b) { return a.lo < b.lo; });
    return out;
  }

  /// Narrows iv to width <= `width` by bisection on the sign change.
  RootInterval refine(const RootInterval& iv, const Rational& width) const {
    if (width <= 0) throw ContractViolation("refinement width must be positive");
    if (iv.exact()) {
      if (sign_at(iv.lo) != 0) throw ContractViolation("point interval is not a root");
      return iv;
    }
    check_certified(iv);
    RootInterval r = iv;
    while (r.width() > width) {
      Rational m = r.midpoint();
      int s = sign_at(m);
      if (s == 0) return RootInterval::point(m, r.poly_degree);
      if (s == r.sign_left) {
        r.lo = m;
      } else {
        r.hi = m;
      }
    }
    return r;
  }

  void check_certified(const RootInterval& iv) const {
    if (!(iv.lo < iv.hi)) throw ContractViolation("root interval must satisfy lo < hi");
    int sl = sign_at(iv.lo), sr = sign_at(iv.hi);
    if (sl == 0 || sr == 0 || sl == sr || count_open(iv.lo, iv.hi) != 1) {
      throw ContractViolation("interval does not isolate exactly one root");
    }
  }

  /// Power of two strictly exceeding the absolute value of every root.
  Rational root_bound() const {
    Rational lead = abs(Rational(z_.back()));
    Rational m = 0;
    for (std::size_t k = 0; k + 1 < z_.size(); ++k) m = std::max(m, Rational(abs(Rational(z_[k])) / lead));
    Rational cauchy = 1 + m;
    Rational b = 1;
    while (b <= cauchy) b *= 2;
    return b;
  }

 private:
  static UniPoly checked_squarefree(const UniPoly& p) {
    if (p.is_zero()) throw UndefinedInputError("root isolation of the zero polynomial");
    return squarefree_part(p);
  }

  // Roots of the squarefree part in (a, b); `count` of them. Endpoints may
  // be roots themselves (already recorded by the caller).
  void bisect(const Rational& a, const Rational& b, int count, std::vector<RootInterval>& out) const {
    if (count == 0) return;
    if (count == 1) {
      out.push_back(tighten(a, b));
      return;
    }
    Rational m = (a + b) / 2;
    int left = count_open(a, m);
    if (sign_at(m) == 0) {
      out.push_back(RootInterval::point(m, sqf_.degree()));
      bisect(a, m, left, out);
      bisect(m, b, count - left - 1, out);
    } else {
      bisect(a, m, left, out);
      bisect(m, b, count - left, out);
    }
  }

  // Single root in (a, b); shrink until neither endpoint is a root.
  RootInterval tighten(Rational a, Rational b) const {
    while (sign_at(a) == 0 || sign_at(b) == 0) {
      Rational m = (a + b) / 2;
      if (sign_at(m) == 0) return RootInterval::point(m, sqf_.degree());
      if (count_open(a, m) == 1) {
        b = m;
      } else {
        a = m;
      }
    }
    return {a, b, sqf_.degree(), sign_at(a), sign_at(b)};
  }

  UniPoly sqf_;
  detail::ZPoly z_;
  SturmSequence sturm_;
};

inline std::vector<RootInterval> isolate_real_roots(const UniPoly& p, RootDomain domain) {
  return RootIsolator(p).isolate(domain);
}

inline RootInterval refine_interval(const UniPoly& p, const RootInterval& iv, const Rational& width) {
  return RootIsolator(p).refine(iv, width);
}

}  // namespace vcalg
