#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "vcalg/errors.hpp"
#include "vcalg/interval.hpp"
#include "vcalg/rational.hpp"
#include "vcalg/roots.hpp"
#include "vcalg/unipoly.hpp"

namespace vcalg {

enum class Method { ML, REML };

inline const char* to_string(Method m) { return m == Method::ML ? "ML" : "REML"; }

/// Univariate stationarity condition in the variance ratio after all common
/// factors are cancelled. On theta >= 0 the denominator is positive and the
/// numerator has the sign of the profile derivative.
struct ProfileEquation {
  UniPoly numerator;
  UniPoly denominator;
  UniPoly raw_numerator;
  UniPoly raw_denominator;
  int expected_degree = 0;
  int observed_degree = 0;
  Method method = Method::ML;
  bool degree_is_bound = false;  // expected_degree is an upper bound, not a law

  bool degree_matches() const {
    return degree_is_bound ? observed_degree <= expected_degree : observed_degree == expected_degree;
  }
  /// Primitive normal form of the numerator (positive leading coefficient).
  UniPoly normal_form() const { return primitive_part(numerator); }
};

/// Cancels gcd(raw_num, raw_den). raw_den must be positive on theta >= 0 so
/// that the sign of the result tracks the sign of raw_num / raw_den.
inline ProfileEquation cancel_common_factors(UniPoly raw_num, UniPoly raw_den, int expected, Method method) {
  if (raw_den.is_zero()) throw ContractViolation("profile equation with zero denominator");
  ProfileEquation eq;
  eq.method = method;
  eq.expected_degree = expected;
  if (raw_num.is_zero()) {
    throw DegenerateDataError("profile equation vanishes identically");
  }
  UniPoly g = poly_gcd(raw_num, raw_den);
  eq.numerator = primitive_preserving_sign(exact_divide(raw_num, g));
  eq.denominator = exact_divide(raw_den, g);
  eq.raw_numerator = std::move(raw_num);
  eq.raw_denominator = std::move(raw_den);
  eq.observed_degree = eq.numerator.degree();
  return eq;
}

/// offset + sum weight_k * log(argument_k(theta)).
struct LogObjective {
  struct Term {
    Rational weight;
    UniPoly argument;
  };
  Rational offset;
  std::vector<Term> terms;

  void add_log(Rational weight, UniPoly argument) { terms.push_back({std::move(weight), std::move(argument)}); }

  RealEnclosure enclose(const RationalInterval& theta) const {
    RealEnclosure total = RealEnclosure::of(RationalInterval(offset));
    for (const auto& t : terms) {
      RationalInterval v = evaluate(t.argument, theta);
      if (!v.positive()) throw ContractViolation("objective logarithm argument is not positive on the interval");
      total += log_enclosure(v).scaled(t.weight);
    }
    return total;
  }
};

enum class PointClass { local_max, local_min, saddle };

inline const char* to_string(PointClass c) {
  switch (c) {
    case PointClass::local_max: return "local_max";
    case PointClass::local_min: return "local_min";
    default: return "saddle";
  }
}

struct StationaryPoint {
  RootInterval theta;
  PointClass cls = PointClass::saddle;
  int sign_left = 0;   // profile derivative sign just below the root (0 at theta = 0)
  int sign_right = 0;
};

/// Estimates at one value of theta, each an exact rational enclosure.
struct Estimates {
  RationalInterval theta;
  std::vector<RationalInterval> beta;  // fixed effects; beta[0] is mu in the common-mean model
  RationalInterval kappa;
  RationalInterval omega;
  RationalInterval tau;
  RealEnclosure loglik;

  const RationalInterval& mu() const {
    if (beta.empty()) throw ContractViolation("no fixed effects estimated");
    return beta.front();
  }
};

struct FitReport {
  ProfileEquation equation;
  std::vector<StationaryPoint> stationary_points;  // theta >= 0, increasing
  std::vector<RootInterval> negative_roots;
  bool boundary_candidate = false;  // profile nonincreasing at theta = 0
  bool boundary_is_max = false;
  int sign_changes = 0;
  Estimates global;
  bool tie = false;
  std::vector<Estimates> tied;  // candidates the ranking could not separate
  std::vector<std::string> diagnostics;
};

using EstimateFn = std::function<Estimates(const RationalInterval&)>;

/// Narrowest width ranking will refine to before flagging a tie.
inline Rational ranking_width_cap() { return pow10(-40); }

namespace detail {

inline int sign_between(const UniPoly& p, const Rational& x) {
  int s = sign_at(p, x);
  if (s == 0) throw ContractViolation("probe point is a root");
  return s;
}

}  // namespace detail

/// Isolates the nonnegative roots of the equation, classifies them from the
/// numerator's sign pattern, and selects the global maximiser of the
/// objective (boundary theta = 0 included) with certified comparisons.
inline FitReport fit_profile(ProfileEquation eq, const LogObjective& objective, const EstimateFn& estimate_at,
                             const Rational& refine_width) {
  if (refine_width <= 0) throw InputError("refine width must be positive");
  FitReport rep;
  const UniPoly& P = eq.numerator;
  rep.sign_changes = descartes_sign_changes(P);
  if (!eq.degree_matches()) {
    rep.diagnostics.push_back("observed degree " + std::to_string(eq.observed_degree) + " differs from expected " +
                              std::to_string(eq.expected_degree));
  }
  RootIsolator iso(P);
  std::vector<RootInterval> all = iso.isolate(RootDomain::all);
  std::vector<RootInterval> roots;
  for (auto& r : all) {
    if (r.hi <= 0 && !(r.exact() && r.lo == 0)) {
      rep.negative_roots.push_back(r);
    } else if (r.lo < 0) {
      // straddles zero: split at the origin
      int s0 = iso.sign_at(0);
      if (s0 == 0) {
        roots.push_back(RootInterval::point(0, r.poly_degree));
      } else if (s0 == r.sign_left) {
        roots.push_back({Rational(0), r.hi, r.poly_degree, s0, r.sign_right});
      } else {
        rep.negative_roots.push_back({r.lo, Rational(0), r.poly_degree, r.sign_left, s0});
      }
    } else {
      roots.push_back(r);
    }
  }
  for (auto& r : roots) r = iso.refine(r, refine_width);

  for (std::size_t k = 0; k < roots.size(); ++k) {
    const RootInterval& r = roots[k];
    StationaryPoint sp{r};
    if (r.exact()) {
      Rational right = k + 1 < roots.size() ? Rational((r.lo + roots[k + 1].lo) / 2) : Rational(r.lo + 1);
      sp.sign_right = detail::sign_between(P, right);
      if (r.lo > 0) {
        Rational left = k > 0 ? Rational((r.lo + roots[k - 1].hi) / 2) : Rational(r.lo / 2);
        sp.sign_left = detail::sign_between(P, left);
      }
    } else {
      sp.sign_left = detail::sign_between(P, r.lo);
      sp.sign_right = detail::sign_between(P, r.hi);
    }
    bool at_zero = r.exact() && r.lo == 0;
    if (at_zero) {
      sp.cls = sp.sign_right < 0 ? PointClass::local_max : PointClass::saddle;
    } else if (sp.sign_left > 0 && sp.sign_right < 0) {
      sp.cls = PointClass::local_max;
    } else {
      // a sign change from - to + is a minimum of the profile, which is a
      // saddle of the full likelihood; no change is an inflection
      sp.cls = PointClass::saddle;
    }
    rep.stationary_points.push_back(sp);
  }

  bool root_at_zero = !roots.empty() && roots.front().exact() && roots.front().lo == 0;
  rep.boundary_candidate = !root_at_zero && sign_at(P, Rational(0)) < 0;

  struct Candidate {
    RootInterval iv;
    bool zero;
  };
  std::vector<Candidate> cands;
  if (rep.boundary_candidate) cands.push_back({RootInterval::point(0, P.degree()), true});
  for (const auto& sp : rep.stationary_points) {
    if (sp.cls == PointClass::local_max) cands.push_back({sp.theta, sp.theta.exact() && sp.theta.lo == 0});
  }
  if (cands.empty()) throw ContractViolation("no maximum candidate on theta >= 0");

  Rational width = refine_width;
  const Rational cap = ranking_width_cap();
  std::size_t best = 0;
  std::vector<std::size_t> unresolved;
  for (;;) {
    std::vector<RealEnclosure> enc;
    enc.reserve(cands.size());
    for (const auto& c : cands) enc.push_back(objective.enclose(RationalInterval::of(c.iv)));
    best = 0;
    for (std::size_t k = 1; k < cands.size(); ++k) {
      if (enc[best].midpoint() < enc[k].midpoint()) best = k;
    }
    unresolved.clear();
    for (std::size_t k = 0; k < cands.size(); ++k) {
      if (k != best && !enc[best].certainly_above(enc[k])) unresolved.push_back(k);
    }
    if (unresolved.empty()) break;
    if (width < cap) {
      rep.tie = true;
      break;
    }
    width /= 2;
    unresolved.push_back(best);
    for (std::size_t k : unresolved) {
      if (!cands[k].iv.exact()) cands[k].iv = iso.refine(cands[k].iv, width);
    }
  }

  // carry refined enclosures back into the stationary-point list
  for (auto& sp : rep.stationary_points) {
    for (const auto& c : cands) {
      if (!sp.theta.exact() && c.iv.lo >= sp.theta.lo && c.iv.hi <= sp.theta.hi) sp.theta = c.iv;
    }
  }
  rep.global = estimate_at(RationalInterval::of(cands[best].iv));
  rep.boundary_is_max = cands[best].zero;
  if (rep.tie) {
    for (std::size_t k : unresolved) rep.tied.push_back(estimate_at(RationalInterval::of(cands[k].iv)));
    rep.diagnostics.push_back("global ranking undecided at width 1e-40");
  }
  rep.equation = std::move(eq);
  return rep;
}

}  // namespace vcalg
