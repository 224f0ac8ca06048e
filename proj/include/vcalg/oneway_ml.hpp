#pragma once

#include <vector>

#include "vcalg/errors.hpp"
#include "vcalg/interval.hpp"
#include "vcalg/oneway_stats.hpp"
#include "vcalg/profile.hpp"
#include "vcalg/unipoly.hpp"

namespace vcalg {

/// Polynomials in theta that the one-way profile equations are built from.
/// f_a = sum m_i n_i a_i prod_{j != i} (1 + n_j theta),
/// g_a = sum m_i n_i^2 a_i prod_{j != i} (1 + n_j theta)^2,
/// for a in {1, B/m, Ybar, Ybar^2}.
struct BasisPolys {
  UniPoly d, d1, d2;
  UniPoly f1, fY, fY2, fBm;
  UniPoly g1, gY, gY2, gBm;

  /// Quadratic-form part shared by the score equations.
  UniPoly H() const { return f1 * f1 * gY2 - Rational(2) * fY * f1 * gY + fY * fY * g1 + f1 * f1 * gBm; }
  /// Cleared residual sum of squares: d * f1 times the profiled RSS.
  UniPoly rss_numerator(const Rational& W) const { return W * f1 * d + fY2 * f1 - fY * fY + f1 * fBm; }
};

inline BasisPolys basis_polynomials(const OneWayStats& s) {
  const int M = s.M();
  std::vector<UniPoly> lin;
  for (int n : s.sizes) lin.push_back(UniPoly::linear(1, n));
  BasisPolys b;
  b.d = b.d1 = b.d2 = UniPoly::constant(1);
  for (int i = 0; i < M; ++i) {
    b.d *= lin[i];
    (s.mults[i] == 1 ? b.d1 : b.d2) *= lin[i];
  }
  std::vector<UniPoly> excl(M, UniPoly::constant(1)), excl2(M, UniPoly::constant(1));
  for (int i = 0; i < M; ++i) {
    for (int j = 0; j < M; ++j) {
      if (j == i) continue;
      excl[i] *= lin[j];
      excl2[i] *= lin[j] * lin[j];
    }
  }
  auto f = [&](auto&& a) {
    UniPoly out;
    for (int i = 0; i < M; ++i) out += excl[i] * (Rational(s.mults[i]) * s.sizes[i] * a(i));
    return out;
  };
  auto g = [&](auto&& a) {
    UniPoly out;
    for (int i = 0; i < M; ++i) out += excl2[i] * (Rational(s.mults[i]) * s.sizes[i] * s.sizes[i] * a(i));
    return out;
  };
  auto one = [](int) { return Rational(1); };
  auto mean = [&](int i) { return s.means[i]; };
  auto mean2 = [&](int i) { return Rational(s.means[i] * s.means[i]); };
  auto bm = [&](int i) { return Rational(s.between_ss[i] / s.mults[i]); };
  b.f1 = f(one);
  b.fY = f(mean);
  b.fY2 = f(mean2);
  b.fBm = f(bm);
  b.g1 = g(one);
  b.gY = g(mean);
  b.gY2 = g(mean2);
  b.gBm = g(bm);
  return b;
}

namespace detail {

inline void require_positive_within_ss(const OneWayStats& s) {
  if (s.within_ss == 0) throw DegenerateDataError("within-group sum of squares is zero");
}

}  // namespace detail

inline ProfileEquation ml_equation(const OneWayStats& s) {
  validate(s);
  detail::require_positive_within_ss(s);
  BasisPolys b = basis_polynomials(s);
  const Rational N = s.N;
  UniPoly f1sq = b.f1 * b.f1;
  UniPoly num = N * b.H() - f1sq * b.rss_numerator(s.within_ss);
  UniPoly den = N * b.d * b.d * f1sq;
  return cancel_common_factors(std::move(num), std::move(den), ml_degree(s.M(), s.M2()), Method::ML);
}

/// Profile log-likelihood N log kappa(theta) - sum m log(1 + n theta) - N,
/// kappa = N f1 d / rss_numerator.
inline LogObjective ml_objective(const OneWayStats& s) {
  BasisPolys b = basis_polynomials(s);
  const Rational N = s.N;
  LogObjective obj;
  obj.offset = -N;
  obj.add_log(N, N * b.f1 * b.d);
  obj.add_log(-N, b.rss_numerator(s.within_ss));
  for (int i = 0; i < s.M(); ++i) obj.add_log(-s.mults[i], UniPoly::linear(1, s.sizes[i]));
  return obj;
}

/// Restricted profile: (N-1) log kappa - sum m log(1 + n theta) - log(f1/d) - (N-1),
/// kappa = (N-1) f1 d / rss_numerator.
inline LogObjective reml_objective(const OneWayStats& s) {
  BasisPolys b = basis_polynomials(s);
  const Rational N1 = s.N - 1;
  LogObjective obj;
  obj.offset = -N1;
  obj.add_log(N1, N1 * b.f1 * b.d);
  obj.add_log(-N1, b.rss_numerator(s.within_ss));
  for (int i = 0; i < s.M(); ++i) obj.add_log(-s.mults[i], UniPoly::linear(1, s.sizes[i]));
  obj.add_log(-1, b.f1);
  obj.add_log(1, b.d);
  return obj;
}

/// mu, kappa, omega = 1/kappa and tau = theta * omega at theta (exact point
/// or certified enclosure), with the profile value attached.
inline Estimates estimates_at(const OneWayStats& s, const RationalInterval& theta, Method method = Method::ML) {
  if (theta.lo < 0) throw ContractViolation("theta must be nonnegative");
  BasisPolys b = basis_polynomials(s);
  Rational scale = method == Method::ML ? Rational(s.N) : Rational(s.N - 1);
  RationalInterval f1 = evaluate(b.f1, theta);
  RationalInterval rss = evaluate(b.rss_numerator(s.within_ss), theta);
  if (!rss.positive()) throw ContractViolation("profiled residual sum of squares is not positive");
  Estimates e;
  e.theta = theta;
  e.beta = {evaluate(b.fY, theta) / f1};
  // omega = rss / (scale f1 d)
  e.omega = rss / (RationalInterval(scale) * f1 * evaluate(b.d, theta));
  e.kappa = e.omega.reciprocal();
  e.tau = theta * e.omega;
  e.loglik = (method == Method::ML ? ml_objective(s) : reml_objective(s)).enclose(theta);
  return e;
}

inline RealEnclosure profile_loglik(const OneWayStats& s, const RationalInterval& theta) {
  if (theta.lo < 0) throw ContractViolation("theta must be nonnegative");
  return ml_objective(s).enclose(theta);
}

inline FitReport ml_fit(const OneWayStats& s, const Rational& refine_width) {
  return fit_profile(
      ml_equation(s), ml_objective(s), [&](const RationalInterval& t) { return estimates_at(s, t, Method::ML); },
      refine_width);
}

}  // namespace vcalg
