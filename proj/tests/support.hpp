#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "vcalg/vcalg.hpp"

namespace testing_support {

using vcalg::Rational;
using vcalg::UniPoly;

inline long draw(std::mt19937_64& rng, long lo, long hi) {
  return lo + static_cast<long>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
}

/// Decimal-like rational in [-span, span] with the given denominator.
inline Rational draw_value(std::mt19937_64& rng, long span, long den) {
  Rational x(draw(rng, -span * den, span * den), den);
  x.canonicalize();
  return x;
}

/// One-way data with group effects of order one and noise of order one half.
inline std::vector<std::vector<Rational>> random_groups(std::mt19937_64& rng, int q, int min_size, int max_size) {
  std::vector<std::vector<Rational>> groups;
  bool large = false;
  for (int i = 0; i < q; ++i) {
    int n = static_cast<int>(draw(rng, min_size, max_size));
    if (i == q - 1 && !large) n = std::max(n, 2);
    large = large || n >= 2;
    Rational effect = draw_value(rng, 2, 10);
    std::vector<Rational> ys;
    for (int k = 0; k < n; ++k) ys.push_back(effect + draw_value(rng, 1, 100) / 2);
    groups.push_back(std::move(ys));
  }
  return groups;
}

inline vcalg::OneWayStats random_stats(std::mt19937_64& rng, int q, int min_size, int max_size) {
  return vcalg::summarize(vcalg::GroupedData{random_groups(rng, q, min_size, max_size)});
}

inline bool proportional(const UniPoly& a, const UniPoly& b) {
  if (a.degree() != b.degree()) return false;
  return a * b.lead() == b * a.lead();
}

inline bool positively_proportional(const UniPoly& a, const UniPoly& b) {
  return proportional(a, b) && sgn(a.lead()) == sgn(b.lead());
}

/// Coefficients (lowest degree first) as a polynomial.
inline UniPoly poly_of(std::initializer_list<long long> c) {
  std::vector<Rational> v;
  for (long long x : c) v.emplace_back(std::to_string(x));
  return UniPoly(v);
}

// ---- floating-point oracles, computed from the raw data ----

using Real = long double;

struct GroupSummary {
  std::vector<Real> n, mean;
  Real within = 0, N = 0;
};

inline GroupSummary group_summary(const std::vector<std::vector<Rational>>& groups) {
  GroupSummary g;
  for (const auto& ys : groups) {
    Real s = 0;
    for (const auto& y : ys) s += static_cast<Real>(y.get_d());
    Real m = s / ys.size();
    for (const auto& y : ys) g.within += (static_cast<Real>(y.get_d()) - m) * (static_cast<Real>(y.get_d()) - m);
    g.n.push_back(ys.size());
    g.mean.push_back(m);
    g.N += ys.size();
  }
  return g;
}

/// Profile log-likelihood (REML when `restricted`) of the one-way model, up
/// to a constant, by generalised least squares on the group means.
inline Real oneway_profile(const GroupSummary& g, Real theta, bool restricted) {
  Real wsum = 0, wy = 0, logdet = 0;
  for (std::size_t i = 0; i < g.n.size(); ++i) {
    Real w = g.n[i] / (1 + g.n[i] * theta);
    wsum += w;
    wy += w * g.mean[i];
    logdet += std::log1p(g.n[i] * theta);
  }
  Real mu = wy / wsum, rss = g.within;
  for (std::size_t i = 0; i < g.n.size(); ++i) {
    Real w = g.n[i] / (1 + g.n[i] * theta);
    rss += w * (g.mean[i] - mu) * (g.mean[i] - mu);
  }
  Real dof = restricted ? g.N - 1 : g.N;
  Real val = -dof * std::log(rss) - logdet;
  if (restricted) val -= std::log(wsum);
  return val;
}

template <class F>
Real golden_max(F f, Real lo, Real hi) {
  const Real r = (std::sqrt(Real(5)) - 1) / 2;
  Real a = lo, b = hi, c = b - r * (b - a), d = a + r * (b - a);
  Real fc = f(c), fd = f(d);
  for (int it = 0; it < 200 && b - a > 1e-14L * (1 + std::fabs(a)); ++it) {
    if (fc < fd) {
      a = c;
      c = d;
      fc = fd;
      d = a + r * (b - a);
      fd = f(d);
    } else {
      b = d;
      d = c;
      fd = fc;
      c = b - r * (b - a);
      fc = f(c);
    }
  }
  Real m = (a + b) / 2;
  return f(lo) >= f(m) ? lo : m;
}

/// Dense grid on [0, upper] (geometric above 1e-4) followed by golden
/// section between the neighbours of the best grid point.
template <class F>
Real grid_maximize(F f, Real upper) {
  std::vector<Real> grid{0};
  for (Real t = 1e-4L; t < upper; t *= 1.01L) grid.push_back(t);
  grid.push_back(upper);
  std::size_t best = 0;
  Real fb = f(grid[0]);
  for (std::size_t k = 1; k < grid.size(); ++k) {
    Real v = f(grid[k]);
    if (v > fb) {
      fb = v;
      best = k;
    }
  }
  Real lo = best == 0 ? grid[0] : grid[best - 1];
  Real hi = best + 1 < grid.size() ? grid[best + 1] : grid[best];
  return golden_max(f, lo, hi);
}

/// -2 log-likelihood of the additive two-way model with the mean profiled
/// out, from the full covariance matrix of the r*q*n observations.
struct TwoWayData {
  int r = 0, q = 0, n = 0;
  std::vector<Real> y;  // index (i*q + j)*n + k
  std::vector<std::vector<std::vector<Rational>>> cells;
};

inline TwoWayData random_twoway(std::mt19937_64& rng, int r, int q, int n) {
  TwoWayData d;
  d.r = r;
  d.q = q;
  d.n = n;
  std::vector<Rational> a, b;
  for (int i = 0; i < r; ++i) a.push_back(draw_value(rng, 2, 10));
  for (int j = 0; j < q; ++j) b.push_back(draw_value(rng, 3, 10));
  d.cells.assign(r, std::vector<std::vector<Rational>>(q));
  for (int i = 0; i < r; ++i) {
    for (int j = 0; j < q; ++j) {
      for (int k = 0; k < n; ++k) {
        Rational y = a[i] + b[j] + draw_value(rng, 1, 100);
        d.cells[i][j].push_back(y);
        d.y.push_back(static_cast<Real>(y.get_d()));
      }
    }
  }
  return d;
}

inline Real twoway_neg2ll(const TwoWayData& d, Real omega, Real tau1, Real tau2) {
  const int N = d.r * d.q * d.n;
  std::vector<Real> V(static_cast<std::size_t>(N) * N);
  auto row_of = [&](int idx) { return idx / (d.q * d.n); };
  auto col_of = [&](int idx) { return (idx / d.n) % d.q; };
  for (int s = 0; s < N; ++s) {
    for (int t = 0; t < N; ++t) {
      Real v = 0;
      if (s == t) v += omega;
      if (row_of(s) == row_of(t)) v += tau1;
      if (col_of(s) == col_of(t)) v += tau2;
      V[s * N + t] = v;
    }
  }
  // Cholesky
  for (int j = 0; j < N; ++j) {
    Real diag = V[j * N + j];
    for (int k = 0; k < j; ++k) diag -= V[j * N + k] * V[j * N + k];
    if (diag <= 0) return INFINITY;
    diag = std::sqrt(diag);
    V[j * N + j] = diag;
    for (int i = j + 1; i < N; ++i) {
      Real s = V[i * N + j];
      for (int k = 0; k < j; ++k) s -= V[i * N + k] * V[j * N + k];
      V[i * N + j] = s / diag;
    }
  }
  auto solve_lower = [&](std::vector<Real> b) {
    for (int i = 0; i < N; ++i) {
      for (int k = 0; k < i; ++k) b[i] -= V[i * N + k] * b[k];
      b[i] /= V[i * N + i];
    }
    return b;
  };
  std::vector<Real> ly = solve_lower(d.y), l1 = solve_lower(std::vector<Real>(N, 1));
  Real s11 = 0, s1y = 0, syy = 0, logdet = 0;
  for (int i = 0; i < N; ++i) {
    s11 += l1[i] * l1[i];
    s1y += l1[i] * ly[i];
    syy += ly[i] * ly[i];
    logdet += 2 * std::log(V[i * N + i]);
  }
  return logdet + syy - s1y * s1y / s11;
}

/// Multistart Nelder-Mead on the nonnegative orthant, then polished by
/// coordinate golden searches.
inline std::array<Real, 3> twoway_numeric_mle(const TwoWayData& d) {
  auto f = [&](const std::array<Real, 3>& x) {
    if (x[0] <= 0 || x[1] < 0 || x[2] < 0) return Real(INFINITY);
    return twoway_neg2ll(d, x[0], x[1], x[2]);
  };
  std::array<Real, 3> best{1, 1, 1};
  Real fbest = f(best);
  for (Real w : {0.05L, 0.3L, 1.5L}) {
    for (Real t1 : {0.0L, 0.5L, 3.0L}) {
      for (Real t2 : {0.0L, 0.5L, 3.0L}) {
        std::array<std::array<Real, 3>, 4> s;
        s[0] = {w, t1, t2};
        for (int k = 0; k < 3; ++k) {
          s[k + 1] = s[0];
          s[k + 1][k] += 0.25L * (1 + s[0][k]);
        }
        std::array<Real, 4> fs;
        for (int k = 0; k < 4; ++k) fs[k] = f(s[k]);
        for (int it = 0; it < 4000; ++it) {
          std::array<int, 4> o{0, 1, 2, 3};
          std::sort(o.begin(), o.end(), [&](int a, int b) { return fs[a] < fs[b]; });
          Real spread = 0;
          for (int k = 1; k < 4; ++k) {
            for (int c = 0; c < 3; ++c) spread = std::max(spread, std::fabs(s[o[k]][c] - s[o[0]][c]));
          }
          if (spread < 1e-13L) break;
          std::array<Real, 3> cen{0, 0, 0};
          for (int k = 0; k < 3; ++k) {
            for (int c = 0; c < 3; ++c) cen[c] += s[o[k]][c] / 3;
          }
          auto along = [&](Real t) {
            std::array<Real, 3> p;
            for (int c = 0; c < 3; ++c) p[c] = cen[c] + t * (s[o[3]][c] - cen[c]);
            for (int c = 1; c < 3; ++c) p[c] = std::max(p[c], Real(0));
            return p;
          };
          auto xr = along(-1);
          Real fr = f(xr);
          if (fr < fs[o[0]]) {
            auto xe = along(-2);
            Real fe = f(xe);
            if (fe < fr) {
              s[o[3]] = xe;
              fs[o[3]] = fe;
            } else {
              s[o[3]] = xr;
              fs[o[3]] = fr;
            }
          } else if (fr < fs[o[2]]) {
            s[o[3]] = xr;
            fs[o[3]] = fr;
          } else {
            auto xc = along(0.5L);
            Real fc = f(xc);
            if (fc < fs[o[3]]) {
              s[o[3]] = xc;
              fs[o[3]] = fc;
            } else {
              for (int k = 1; k < 4; ++k) {
                for (int c = 0; c < 3; ++c) s[o[k]][c] = (s[o[k]][c] + s[o[0]][c]) / 2;
                fs[o[k]] = f(s[o[k]]);
              }
            }
          }
        }
        int arg = static_cast<int>(std::min_element(fs.begin(), fs.end()) - fs.begin());
        if (fs[arg] < fbest) {
          fbest = fs[arg];
          best = s[arg];
        }
      }
    }
  }
  for (int sweep = 0; sweep < 30; ++sweep) {
    for (int c = 0; c < 3; ++c) {
      Real lo = c == 0 ? best[0] / 2 : 0, hi = best[c] * 1.5L + 1e-3L;
      auto g = [&](Real t) {
        auto x = best;
        x[c] = t;
        return -f(x);
      };
      best[c] = golden_max(g, lo, hi);
    }
  }
  return best;
}

}  // namespace testing_support
