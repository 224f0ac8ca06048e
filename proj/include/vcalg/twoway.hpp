#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "vcalg/errors.hpp"
#include "vcalg/interval.hpp"
#include "vcalg/multipoly.hpp"
#include "vcalg/profile.hpp"
#include "vcalg/rational.hpp"
#include "vcalg/roots.hpp"
#include "vcalg/unipoly.hpp"

namespace vcalg {

enum class TwoWayModel { additive, interaction };

inline const char* to_string(TwoWayModel m) { return m == TwoWayModel::additive ? "additive" : "interaction"; }

struct TwoWayStats {
  int r = 0, q = 0, n = 0;
  Rational SSA, SSB, SSAB, SSE;
  Rational grand_mean;
};

inline void validate(const TwoWayStats& s) {
  if (s.r < 2 || s.q < 2) throw ModelAssumptionError("two-way layout needs at least two levels of each factor");
  if (s.n < 1) throw InputError("replicate count must be positive");
  if (s.SSA < 0 || s.SSB < 0 || s.SSAB < 0 || s.SSE < 0) throw InputError("sums of squares must be nonnegative");
  if (s.n == 1 && s.SSE != 0) throw InputError("SSE must be zero without replication");
}

/// Sums of squares of a balanced r x q x n array y[i][j][k].
inline TwoWayStats twoway_stats(const std::vector<std::vector<std::vector<Rational>>>& y) {
  TwoWayStats s;
  s.r = static_cast<int>(y.size());
  s.q = s.r > 0 ? static_cast<int>(y[0].size()) : 0;
  s.n = s.q > 0 ? static_cast<int>(y[0][0].size()) : 0;
  if (s.r < 2 || s.q < 2) throw ModelAssumptionError("two-way layout needs at least two levels of each factor");
  for (const auto& row : y) {
    if (static_cast<int>(row.size()) != s.q) throw InputError("two-way layout is not rectangular");
    for (const auto& cell : row) {
      if (static_cast<int>(cell.size()) != s.n || s.n == 0) throw InputError("two-way layout is not balanced");
    }
  }
  const std::size_t r = s.r, q = s.q;
  std::vector<std::vector<Rational>> cell(r, std::vector<Rational>(q));
  std::vector<Rational> row_mean(r), col_mean(q);
  Rational grand = 0;
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = 0; j < q; ++j) {
      for (const auto& v : y[i][j]) cell[i][j] += v;
      cell[i][j] /= s.n;
      row_mean[i] += cell[i][j];
      col_mean[j] += cell[i][j];
      grand += cell[i][j];
    }
  }
  for (auto& m : row_mean) m /= s.q;
  for (auto& m : col_mean) m /= s.r;
  grand /= static_cast<long>(r * q);
  s.grand_mean = grand;
  for (std::size_t i = 0; i < r; ++i) s.SSA += (row_mean[i] - grand) * (row_mean[i] - grand);
  s.SSA *= static_cast<long>(s.q) * s.n;
  for (std::size_t j = 0; j < q; ++j) s.SSB += (col_mean[j] - grand) * (col_mean[j] - grand);
  s.SSB *= static_cast<long>(s.r) * s.n;
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = 0; j < q; ++j) {
      Rational t = cell[i][j] - row_mean[i] - col_mean[j] + grand;
      s.SSAB += t * t;
      for (const auto& v : y[i][j]) s.SSE += (v - cell[i][j]) * (v - cell[i][j]);
    }
  }
  s.SSAB *= s.n;
  return s;
}

/// Eigenvalue lambda = c0 + cv v + c1 tau1 + c2 tau2 of the covariance with
/// multiplicity `mult`, paired with the sum of squares in its eigenspace.
struct EigenTerm {
  long mult;
  Rational ss;
  std::array<Rational, 4> coef;  // constant, v, tau1, tau2

  RationalInterval at(const std::array<RationalInterval, 3>& x) const {
    RationalInterval out(coef[0]);
    for (std::size_t k = 0; k < 3; ++k) {
      if (coef[k + 1] != 0) out = out + RationalInterval(coef[k + 1]) * x[k];
    }
    return out;
  }
};

/// Cleared ML equations in (v, tau1, tau2). For the additive model v = omega;
/// for the interaction model omega is fixed at SSE / (rq(n-1)) and v = tau12.
struct TwoWaySystem {
  TwoWayModel model = TwoWayModel::additive;
  TwoWayStats stats;
  Rational mu_hat;
  std::optional<Rational> omega_hat;
  VariableTags vars;
  std::array<MultiPoly, 3> equations;
  UniPoly base;                       // smallest random eigenvalue as a polynomial in v
  Rational base_mult, base_ss;        // its multiplicity and sum of squares
  std::vector<UniPoly> clearing_factors;
  std::vector<EigenTerm> spectrum;
  bool degenerate = false;
  std::string diagnostic;
};

inline TwoWaySystem ml_system(const TwoWayStats& s, TwoWayModel model) {
  validate(s);
  TwoWaySystem sys;
  sys.model = model;
  sys.stats = s;
  sys.mu_hat = s.grand_mean;
  const Rational r = s.r, q = s.q, n = s.n;
  const Rational qn = q * n, rn = r * n;
  // e = e0 + ev * v
  Rational e0, ev;
  if (model == TwoWayModel::additive) {
    sys.vars = {"omega", "tau1", "tau2"};
    e0 = 0;
    ev = 1;
    sys.base_mult = r * q * n - r - q + 1;
    sys.base_ss = s.SSAB + s.SSE;
    sys.spectrum.push_back({static_cast<long>(s.r) * s.q * s.n - s.r - s.q + 1, sys.base_ss, {0, 1, 0, 0}});
  } else {
    if (s.n < 2) throw ModelAssumptionError("interaction model needs replicated cells");
    sys.vars = {"tau12", "tau1", "tau2"};
    Rational w = s.SSE / (r * q * (n - 1));
    sys.omega_hat = w;
    e0 = w;
    ev = n;
    sys.base_mult = (r - 1) * (q - 1);
    sys.base_ss = s.SSAB;
    sys.spectrum.push_back({static_cast<long>(s.r) * s.q * (s.n - 1), s.SSE, {w, 0, 0, 0}});
    sys.spectrum.push_back({static_cast<long>(s.r - 1) * (s.q - 1), s.SSAB, {w, n, 0, 0}});
    if (w == 0) {
      sys.degenerate = true;
      sys.diagnostic = "within-cell sum of squares is zero, error variance estimate vanishes";
    }
  }
  sys.spectrum.push_back({s.r - 1, s.SSA, {e0, ev, qn, 0}});
  sys.spectrum.push_back({s.q - 1, s.SSB, {e0, ev, 0, rn}});
  sys.spectrum.push_back({1, 0, {e0, ev, qn, rn}});
  if (model == TwoWayModel::additive && sys.base_ss == 0) {
    sys.degenerate = true;
    sys.diagnostic = "residual sum of squares is zero, error variance estimate vanishes";
  }

  const VariableTags& v = sys.vars;
  auto cst = [&](const Rational& c) { return MultiPoly::constant(c, v); };
  MultiPoly E = cst(e0) + MultiPoly::variable(0, v) * ev;
  MultiPoly t1 = MultiPoly::variable(1, v), t2 = MultiPoly::variable(2, v);
  MultiPoly A = E + t1 * qn, B = E + t2 * rn, C = E + t1 * qn + t2 * rn;
  sys.equations[0] = sys.base_mult * E * C - E * E - sys.base_ss * C;
  sys.equations[1] = (r - 1) * A * C + A * A - s.SSA * C;
  sys.equations[2] = (q - 1) * B * C + B * B - s.SSB * C;
  sys.base = UniPoly::linear(e0, ev, v[0]);
  sys.clearing_factors = {sys.base, sys.base * sys.base_mult - UniPoly::constant(sys.base_ss, v[0])};
  return sys;
}

/// tau_coeff * tau + in_v(v) = 0 on the roots of the eliminant.
struct TauRelation {
  Rational tau_coeff;
  UniPoly in_v;
  bool valid = false;

  RationalInterval solve(const RationalInterval& v) const {
    return -evaluate(in_v, v) * RationalInterval(1 / tau_coeff);
  }
};

struct Elimination {
  UniPoly raw;       // iterated resultant before cleanup
  UniPoly quartic;   // eliminant in v, primitive normal form
  TauRelation tau1, tau2;
  bool degenerate = false;
  std::vector<std::string> diagnostics;
};

namespace detail {

using PolyOverPoly = std::vector<UniPoly>;  // coefficients in tau, each a polynomial in v

inline PolyOverPoly reduce_mod(PolyOverPoly p, const UniPoly& m) {
  for (auto& c : p) c = divmod(c, m).remainder;
  while (!p.empty() && p.back().is_zero()) p.pop_back();
  return p;
}

inline PolyOverPoly as_poly_over_poly(const MultiPoly& f, int tau) {
  PolyOverPoly out;
  for (int k = 0; k <= f.degree_in(tau); ++k) out.push_back(f.coefficient_in(tau, k).to_unipoly(0));
  return out;
}

/// Remainder sequence in (Q[v]/m)[tau] down to a linear member, returned as
/// tau in terms of v, reduced modulo m.
inline std::optional<UniPoly> linear_in_tau(const MultiPoly& f, const MultiPoly& g, int tau, const UniPoly& m) {
  PolyOverPoly a = reduce_mod(as_poly_over_poly(f, tau), m);
  PolyOverPoly b = reduce_mod(as_poly_over_poly(g, tau), m);
  if (a.size() < b.size()) std::swap(a, b);
  for (int guard = 0; guard < 64; ++guard) {
    if (b.size() == 2) break;
    if (b.size() < 2) return std::nullopt;
    while (a.size() >= b.size() && !a.empty()) {
      std::size_t shift = a.size() - b.size();
      UniPoly la = a.back(), lb = b.back();
      PolyOverPoly next(a.size());
      for (std::size_t k = 0; k < a.size(); ++k) next[k] = lb * a[k];
      for (std::size_t k = 0; k < b.size(); ++k) next[k + shift] -= la * b[k];
      a = reduce_mod(std::move(next), m);
    }
    std::swap(a, b);
  }
  if (b.size() != 2) return std::nullopt;
  try {
    UniPoly inv = inverse_mod(b[1], m);
    return divmod(-b[0] * inv, m).remainder;
  } catch (const DivisibilityError&) {
    return std::nullopt;
  }
}

inline TauRelation make_relation(const UniPoly& tau_of_v, const VariableTags& vars, int tau) {
  MultiPoly rel = MultiPoly::variable(tau, vars) - MultiPoly::from_unipoly(tau_of_v, 0, vars);
  rel = primitive_preserving_sign(rel);
  TauRelation out;
  out.tau_coeff = rel.coefficient_in(tau, 1).to_unipoly(0).coeff(0);
  out.in_v = rel.coefficient_in(tau, 0).to_unipoly(0);
  out.valid = true;
  return out;
}

// Strips every factor shared with `h` from p.
inline UniPoly strip_factor(UniPoly p, const UniPoly& h) {
  if (h.degree() < 1 || p.is_zero()) return p;
  for (;;) {
    UniPoly g = poly_gcd(p, h);
    if (g.degree() < 1) return p;
    p = exact_divide(p, g);
  }
}

}  // namespace detail

inline Elimination eliminate_to_quartic(const TwoWaySystem& sys) {
  Elimination out;
  const auto& F = sys.equations;
  MultiPoly R12 = resultant_eliminate(F[0], F[1], 2);
  MultiPoly R13 = resultant_eliminate(F[0], F[2], 2);
  if (R12.degree_in(1) < 1 || R13.degree_in(1) < 1) {
    out.degenerate = true;
    out.diagnostics.push_back("first elimination step lost the tau1 dependence");
    return out;
  }
  out.raw = resultant_eliminate(R12, R13, 1).to_unipoly(0);
  if (out.raw.is_zero()) {
    out.degenerate = true;
    out.diagnostics.push_back("eliminant vanishes identically; system has a positive-dimensional component");
    return out;
  }
  UniPoly Q = out.raw;
  for (const auto& h : sys.clearing_factors) Q = detail::strip_factor(Q, h);
  Q = squarefree_part(Q);
  if (Q.degree() > 4) {
    // resultant leading coefficients vanishing together add spurious roots
    for (const MultiPoly* R : {&R12, &R13}) {
      MultiPoly lc = R->coefficient_in(1, R->degree_in(1));
      if (lc.degree_in(2) <= 0) Q = detail::strip_factor(Q, lc.to_unipoly(0));
    }
  }
  Q.set_var(sys.vars[0]);
  out.quartic = primitive_part(Q);
  if (out.quartic.degree() != 4) {
    out.diagnostics.push_back("eliminant has degree " + std::to_string(out.quartic.degree()) + ", expected 4");
  }
  if (out.quartic.degree() < 1) {
    out.degenerate = true;
    return out;
  }

  auto tau1 = detail::linear_in_tau(R12, R13, 1, out.quartic);
  MultiPoly S12 = resultant_eliminate(F[0], F[1], 1);
  MultiPoly S13 = resultant_eliminate(F[0], F[2], 1);
  std::optional<UniPoly> tau2;
  if (S12.degree_in(2) >= 1 && S13.degree_in(2) >= 1) tau2 = detail::linear_in_tau(S12, S13, 2, out.quartic);
  if (tau1) {
    out.tau1 = detail::make_relation(*tau1, sys.vars, 1);
  } else {
    out.diagnostics.push_back("no linear tau1 relation modulo the eliminant");
  }
  if (tau2) {
    out.tau2 = detail::make_relation(*tau2, sys.vars, 2);
  } else {
    out.diagnostics.push_back("no linear tau2 relation modulo the eliminant");
  }
  return out;
}

/// One real root of the eliminant with back-substituted variance components.
struct TwoWaySolution {
  RootInterval v;
  RationalInterval omega, tau1, tau2;
  std::optional<RationalInterval> tau12;
  bool feasible = false;
  bool feasibility_certain = true;
  std::optional<RealEnclosure> loglik;
  std::array<RationalInterval, 3> residuals;
};

struct TwoWayFitReport {
  TwoWaySystem system;
  Elimination elimination;
  std::vector<TwoWaySolution> solutions;
  std::optional<std::size_t> global;
  bool boundary = false;  // no feasible interior stationary point
  bool tie = false;
  std::vector<std::string> diagnostics;
};

/// Twice the log-likelihood up to an additive constant:
/// -sum mult log(lambda) - sum ss / lambda.
inline RealEnclosure twoway_loglik(const TwoWaySystem& sys, const std::array<RationalInterval, 3>& x) {
  RealEnclosure total = RealEnclosure::of(RationalInterval(Rational(0)));
  for (const auto& t : sys.spectrum) {
    RationalInterval lam = t.at(x);
    if (!lam.positive()) throw ContractViolation("covariance eigenvalue is not positive");
    total += log_enclosure(lam).scaled(-t.mult);
    if (t.ss != 0) total += RealEnclosure::of(-RationalInterval(t.ss) / lam);
  }
  return total;
}

/// Residuals of the three score equations in uncleared form.
inline std::array<RationalInterval, 3> twoway_residuals(const TwoWaySystem& sys,
                                                        const std::array<RationalInterval, 3>& x) {
  const auto& s = sys.stats;
  const Rational qn = Rational(s.q) * s.n, rn = Rational(s.r) * s.n;
  RationalInterval e = evaluate(sys.base, x[0]);
  RationalInterval a = e + RationalInterval(qn) * x[1];
  RationalInterval b = e + RationalInterval(rn) * x[2];
  RationalInterval c = a + RationalInterval(rn) * x[2];
  auto inv = [](const RationalInterval& z) { return z.reciprocal(); };
  return {RationalInterval(sys.base_mult) * inv(e) - inv(c) - RationalInterval(sys.base_ss) * inv(e * e),
          RationalInterval(Rational(s.r - 1)) * inv(a) + inv(c) - RationalInterval(s.SSA) * inv(a * a),
          RationalInterval(Rational(s.q - 1)) * inv(b) + inv(c) - RationalInterval(s.SSB) * inv(b * b)};
}

inline TwoWayFitReport fit_twoway(const TwoWayStats& stats, TwoWayModel model, const Rational& refine_width) {
  if (refine_width <= 0) throw InputError("refine width must be positive");
  TwoWayFitReport rep;
  rep.system = ml_system(stats, model);
  if (rep.system.degenerate) {
    rep.boundary = true;
    rep.diagnostics.push_back(rep.system.diagnostic);
    return rep;
  }
  rep.elimination = eliminate_to_quartic(rep.system);
  for (const auto& d : rep.elimination.diagnostics) rep.diagnostics.push_back(d);
  if (rep.elimination.degenerate || !rep.elimination.tau1.valid || !rep.elimination.tau2.valid) {
    rep.boundary = true;
    rep.diagnostics.push_back("no interior stationary point could be recovered");
    return rep;
  }
  const TwoWaySystem& sys = rep.system;
  RootIsolator iso(rep.elimination.quartic);
  const Rational cap = ranking_width_cap();

  auto build = [&](const RootInterval& iv) {
    TwoWaySolution sol;
    sol.v = iv;
    RationalInterval v = RationalInterval::of(iv);
    sol.tau1 = rep.elimination.tau1.solve(v);
    sol.tau2 = rep.elimination.tau2.solve(v);
    if (model == TwoWayModel::additive) {
      sol.omega = v;
    } else {
      sol.omega = RationalInterval(*sys.omega_hat);
      sol.tau12 = v;
    }
    RationalInterval random0 = model == TwoWayModel::additive ? sol.omega : *sol.tau12;
    // feasibility: omega > 0, every tau >= 0
    bool neg = random0.hi < 0 || sol.tau1.hi < 0 || sol.tau2.hi < 0 ||
               (model == TwoWayModel::additive && sol.omega.hi <= 0);
    bool pos = (model == TwoWayModel::additive ? sol.omega.lo > 0 : random0.lo >= 0) && sol.tau1.lo >= 0 &&
               sol.tau2.lo >= 0;
    sol.feasible = pos;
    sol.feasibility_certain = pos || neg;
    std::array<RationalInterval, 3> x{v, sol.tau1, sol.tau2};
    bool eigen_positive = true;
    for (const auto& t : sys.spectrum) eigen_positive = eigen_positive && t.at(x).positive();
    if (eigen_positive) {
      sol.loglik = twoway_loglik(sys, x);
      sol.residuals = twoway_residuals(sys, x);
    }
    return sol;
  };

  std::vector<RootInterval> roots = iso.isolate(RootDomain::all);
  for (auto& r : roots) {
    Rational w = refine_width;
    r = iso.refine(r, w);
    TwoWaySolution sol = build(r);
    while (!sol.feasibility_certain && w > cap) {
      w /= 1024;
      r = iso.refine(r, w);
      sol = build(r);
    }
    if (!sol.feasibility_certain) rep.diagnostics.push_back("feasibility undecided for a root on the boundary");
    rep.solutions.push_back(std::move(sol));
  }

  std::vector<std::size_t> feasible;
  for (std::size_t k = 0; k < rep.solutions.size(); ++k) {
    if (rep.solutions[k].feasible && rep.solutions[k].loglik) feasible.push_back(k);
  }
  if (feasible.empty()) {
    rep.boundary = true;
    rep.diagnostics.push_back("no feasible interior stationary point; optimum lies on the boundary");
    return rep;
  }
  std::size_t best = feasible.front();
  Rational w = refine_width;
  for (;;) {
    for (std::size_t k : feasible) {
      if (rep.solutions[best].loglik->midpoint() < rep.solutions[k].loglik->midpoint()) best = k;
    }
    bool decisive = true;
    for (std::size_t k : feasible) {
      if (k != best && !rep.solutions[best].loglik->certainly_above(*rep.solutions[k].loglik)) decisive = false;
    }
    if (decisive) break;
    if (w < cap) {
      rep.tie = true;
      rep.diagnostics.push_back("global ranking undecided at width 1e-40");
      break;
    }
    w /= 2;
    for (std::size_t k : feasible) rep.solutions[k] = build(iso.refine(rep.solutions[k].v, w));
  }
  rep.global = best;
  return rep;
}

}  // namespace vcalg
