#pragma once

#include <map>
#include <vector>

#include "vcalg/bareiss.hpp"
#include "vcalg/errors.hpp"
#include "vcalg/interval.hpp"
#include "vcalg/oneway_stats.hpp"
#include "vcalg/profile.hpp"
#include "vcalg/unipoly.hpp"

namespace vcalg {

/// Mixed model Y = X beta + group effect + error. Rows are stored group by
/// group; group_sizes[i] consecutive rows form group i.
struct DesignProblem {
  Matrix<Rational> X;
  std::vector<Rational> Y;
  std::vector<int> group_sizes;

  std::size_t N() const { return Y.size(); }
  std::size_t p() const { return X.empty() ? 0 : X.front().size(); }

  /// Builds a design from grouped responses and optional per-row covariates,
  /// prepending an all-ones column when `intercept` is set.
  static DesignProblem from_grouped(const std::vector<std::vector<Rational>>& groups,
                                    const std::vector<std::vector<std::vector<Rational>>>& covariates,
                                    bool intercept) {
    DesignProblem d;
    for (std::size_t i = 0; i < groups.size(); ++i) {
      d.group_sizes.push_back(static_cast<int>(groups[i].size()));
      for (std::size_t k = 0; k < groups[i].size(); ++k) {
        std::vector<Rational> row;
        if (intercept) row.emplace_back(1);
        if (i < covariates.size() && k < covariates[i].size()) {
          row.insert(row.end(), covariates[i][k].begin(), covariates[i][k].end());
        }
        d.X.push_back(std::move(row));
        d.Y.push_back(groups[i][k]);
      }
    }
    return d;
  }
};

inline void validate(const DesignProblem& d) {
  const std::size_t N = d.N(), p = d.p();
  if (d.X.size() != N) throw InputError("X and Y must have the same number of rows");
  if (p == 0) throw InputError("design matrix has no columns");
  for (const auto& row : d.X) {
    if (row.size() != p) throw InputError("design matrix rows differ in length");
  }
  long total = 0;
  for (int n : d.group_sizes) {
    if (n < 1) throw InputError("group sizes must be positive");
    total += n;
  }
  if (static_cast<std::size_t>(total) != N) throw InputError("group sizes must add up to the number of rows");
  if (d.group_sizes.size() < 2) throw ModelAssumptionError("the layout needs at least two groups");
  if (p >= N) throw ModelAssumptionError("need more observations than fixed effects");
  Matrix<Rational> xtx(p, std::vector<Rational>(p));
  for (const auto& row : d.X) {
    for (std::size_t a = 0; a < p; ++a) {
      for (std::size_t b = 0; b < p; ++b) xtx[a][b] += row[a] * row[b];
    }
  }
  if (bareiss_determinant(xtx) == 0) throw ModelAssumptionError("design matrix is not of full column rank");
}

/// Generalised least squares as rational functions of theta. With
/// A = X'K X, b = X'K Y, c = Y'K Y for the covariance shape
/// K = blockdiag(I - theta/(1 + n theta) 11'), and d = prod over distinct
/// sizes of (1 + n theta):
///   det(d A) = delta, beta = beta_num / delta, rss = P / D with D = d delta.
struct GlsProfile {
  UniPoly d;
  UniPoly f1;  // sum over groups of n / (1 + n theta), times d
  Matrix<UniPoly> A;
  std::vector<UniPoly> b;
  UniPoly c;
  UniPoly delta;
  std::vector<UniPoly> beta_num;
  UniPoly P;
  UniPoly D;
  std::vector<int> sizes;
  std::vector<int> mults;
  long N = 0;
  long p = 0;
};

inline GlsProfile gls_profile(const DesignProblem& design) {
  validate(design);
  const std::size_t p = design.p();
  std::map<int, int> mult;
  for (int n : design.group_sizes) ++mult[n];

  GlsProfile g;
  g.N = static_cast<long>(design.N());
  g.p = static_cast<long>(p);
  std::map<int, UniPoly> others;  // d / (1 + n theta)
  g.d = UniPoly::constant(1);
  for (const auto& [n, m] : mult) {
    g.sizes.push_back(n);
    g.mults.push_back(m);
    g.d *= UniPoly::linear(1, n);
  }
  for (const auto& [n, m] : mult) others[n] = exact_divide(g.d, UniPoly::linear(1, n));
  g.f1 = UniPoly();
  for (const auto& [n, m] : mult) g.f1 += others[n] * Rational(static_cast<long>(m) * n);

  // Per-size accumulation of the constant pieces X'X, X'1 1'X, ...
  struct Pieces {
    Matrix<Rational> xx, xsxs;
    std::vector<Rational> xy, xsys;
    Rational yy, ysys;
  };
  std::map<int, Pieces> acc;
  std::size_t row = 0;
  for (int n : design.group_sizes) {
    Pieces& pc = acc[n];
    if (pc.xx.empty()) {
      pc.xx = pc.xsxs = Matrix<Rational>(p, std::vector<Rational>(p));
      pc.xy = pc.xsys = std::vector<Rational>(p);
    }
    std::vector<Rational> xs(p);
    Rational ys = 0;
    for (int k = 0; k < n; ++k, ++row) {
      const auto& x = design.X[row];
      const Rational& y = design.Y[row];
      for (std::size_t a = 0; a < p; ++a) {
        xs[a] += x[a];
        pc.xy[a] += x[a] * y;
        for (std::size_t b = 0; b < p; ++b) pc.xx[a][b] += x[a] * x[b];
      }
      ys += y;
      pc.yy += y * y;
    }
    for (std::size_t a = 0; a < p; ++a) {
      pc.xsys[a] += xs[a] * ys;
      for (std::size_t b = 0; b < p; ++b) pc.xsxs[a][b] += xs[a] * xs[b];
    }
    pc.ysys += ys * ys;
  }

  const UniPoly theta = UniPoly::monomial(1, 1);
  g.A = Matrix<UniPoly>(p, std::vector<UniPoly>(p));
  g.b = std::vector<UniPoly>(p);
  g.c = UniPoly();
  for (const auto& [n, pc] : acc) {
    UniPoly shrink = theta * others[n];
    for (std::size_t a = 0; a < p; ++a) {
      g.b[a] += g.d * pc.xy[a] - shrink * pc.xsys[a];
      for (std::size_t b = 0; b < p; ++b) g.A[a][b] += g.d * pc.xx[a][b] - shrink * pc.xsxs[a][b];
    }
    g.c += g.d * pc.yy - shrink * pc.ysys;
  }

  g.delta = bareiss_determinant(g.A);
  if (g.delta.is_zero()) throw ModelAssumptionError("GLS normal equations are singular");
  for (std::size_t j = 0; j < p; ++j) {
    Matrix<UniPoly> Aj = g.A;
    for (std::size_t a = 0; a < p; ++a) Aj[a][j] = g.b[a];
    g.beta_num.push_back(bareiss_determinant(Aj));
  }
  g.P = g.c * g.delta;
  for (std::size_t j = 0; j < p; ++j) g.P -= g.b[j] * g.beta_num[j];
  g.D = g.d * g.delta;
  return g;
}

namespace detail {

inline void require_nonconstant_rss(const GlsProfile& g) {
  if (g.P.is_zero()) throw DegenerateDataError("residual sum of squares vanishes identically");
  if (divides(g.D, g.P) && exact_divide(g.P, g.D).degree() <= 0) {
    throw DegenerateDataError("residual sum of squares does not depend on theta");
  }
}

// (P'D - PD')
inline UniPoly rss_wronskian(const GlsProfile& g) { return g.P.derivative() * g.D - g.P * g.D.derivative(); }

}  // namespace detail

/// The bound 3q - 3 is carried as expected_degree with
/// degree_is_bound set.
inline ProfileEquation ml_equation_x(const GlsProfile& g) {
  detail::require_nonconstant_rss(g);
  UniPoly num = Rational(-g.N) * detail::rss_wronskian(g) - g.f1 * g.P * g.delta;
  UniPoly den = g.P * g.D;
  long q = 0;
  for (int m : g.mults) q += m;
  ProfileEquation eq = cancel_common_factors(std::move(num), std::move(den), static_cast<int>(3 * q - 3), Method::ML);
  eq.degree_is_bound = true;
  return eq;
}

/// Restricted criterion (N-p) log kappa - sum log(1 + n theta) - log det(X'KX).
inline ProfileEquation reml_equation_x(const GlsProfile& g) {
  detail::require_nonconstant_rss(g);
  const Rational Np = g.N - g.p;
  UniPoly num = -Np * detail::rss_wronskian(g) - g.f1 * g.P * g.delta - g.delta.derivative() * g.P * g.d +
                Rational(g.p) * g.d.derivative() * g.P * g.delta;
  UniPoly den = g.P * g.D;
  long q = 0;
  for (int m : g.mults) q += m;
  ProfileEquation eq =
      cancel_common_factors(std::move(num), std::move(den), static_cast<int>(2 * q - 3), Method::REML);
  eq.degree_is_bound = true;
  return eq;
}

inline ProfileEquation ml_equation_x(const DesignProblem& d) { return ml_equation_x(gls_profile(d)); }
inline ProfileEquation reml_equation_x(const DesignProblem& d) { return reml_equation_x(gls_profile(d)); }

inline LogObjective objective_x(const GlsProfile& g, Method method) {
  const Rational scale = method == Method::ML ? Rational(g.N) : Rational(g.N - g.p);
  LogObjective obj;
  obj.offset = -scale;
  obj.add_log(scale, UniPoly::constant(scale) * g.D);
  obj.add_log(-scale, g.P);
  for (std::size_t i = 0; i < g.sizes.size(); ++i) obj.add_log(-g.mults[i], UniPoly::linear(1, g.sizes[i]));
  if (method == Method::REML) {
    obj.add_log(-1, g.delta);
    obj.add_log(g.p, g.d);
  }
  return obj;
}

inline Estimates estimates_at_x(const GlsProfile& g, const RationalInterval& theta, Method method) {
  if (theta.lo < 0) throw ContractViolation("theta must be nonnegative");
  Estimates e;
  e.theta = theta;
  RationalInterval delta = evaluate(g.delta, theta);
  for (const auto& bn : g.beta_num) e.beta.push_back(evaluate(bn, theta) / delta);
  RationalInterval rss = evaluate(g.P, theta) / evaluate(g.D, theta);
  if (!rss.positive()) throw ContractViolation("residual sum of squares is not positive");
  Rational scale = method == Method::ML ? Rational(g.N) : Rational(g.N - g.p);
  e.omega = rss / RationalInterval(scale);
  e.kappa = e.omega.reciprocal();
  e.tau = theta * e.omega;
  e.loglik = objective_x(g, method).enclose(theta);
  return e;
}

inline FitReport fit_x(const DesignProblem& design, Method method, const Rational& refine_width) {
  GlsProfile g = gls_profile(design);
  ProfileEquation eq = method == Method::ML ? ml_equation_x(g) : reml_equation_x(g);
  return fit_profile(
      std::move(eq), objective_x(g, method),
      [&](const RationalInterval& t) { return estimates_at_x(g, t, method); }, refine_width);
}

}  // namespace vcalg
