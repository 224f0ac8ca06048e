#pragma once

#include "vcalg/oneway_ml.hpp"

namespace vcalg {

inline ProfileEquation reml_equation(const OneWayStats& s) {
  validate(s);
  detail::require_positive_within_ss(s);
  BasisPolys b = basis_polynomials(s);
  UniPoly rss = b.rss_numerator(s.within_ss);
  UniPoly num = (b.g1 - b.f1 * b.f1) * rss + Rational(s.N - 1) * b.H();
  UniPoly den = b.d * b.f1 * rss;
  return cancel_common_factors(std::move(num), std::move(den), reml_degree(s.M(), s.M2()), Method::REML);
}

inline RealEnclosure restricted_loglik(const OneWayStats& s, const RationalInterval& theta) {
  if (theta.lo < 0) throw ContractViolation("theta must be nonnegative");
  return reml_objective(s).enclose(theta);
}

inline FitReport reml_fit(const OneWayStats& s, const Rational& refine_width) {
  return fit_profile(
      reml_equation(s), reml_objective(s),
      [&](const RationalInterval& t) { return estimates_at(s, t, Method::REML); }, refine_width);
}

}  // namespace vcalg
