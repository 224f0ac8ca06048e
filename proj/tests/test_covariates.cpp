#include <gtest/gtest.h>

#include "support.hpp"

using namespace vcalg;
using testing_support::draw;
using testing_support::draw_value;

namespace {

using Mat = std::vector<std::vector<Rational>>;

struct Instance {
  std::vector<std::vector<Rational>> groups;
  std::vector<std::vector<std::vector<Rational>>> cov;
};

Instance random_instance(std::mt19937_64& rng, int q, int covariates) {
  Instance in;
  in.groups = testing_support::random_groups(rng, q, 1, 5);
  for (const auto& g : in.groups) {
    std::vector<std::vector<Rational>> rows;
    for (std::size_t k = 0; k < g.size(); ++k) {
      std::vector<Rational> x;
      for (int c = 0; c < covariates; ++c) x.push_back(draw_value(rng, 3, 10));
      rows.push_back(std::move(x));
    }
    in.cov.push_back(std::move(rows));
  }
  return in;
}

// Gauss-Jordan solve over the rationals.
std::vector<Rational> solve(Mat A, std::vector<Rational> b) {
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    while (A[piv][c] == 0) ++piv;
    std::swap(A[piv], A[c]);
    std::swap(b[piv], b[c]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c || A[r][c] == 0) continue;
      Rational f = A[r][c] / A[c][c];
      for (std::size_t k = c; k < n; ++k) A[r][k] -= f * A[c][k];
      b[r] -= f * b[c];
    }
  }
  for (std::size_t c = 0; c < n; ++c) b[c] /= A[c][c];
  return b;
}

Mat inverse(const Mat& A) {
  const std::size_t n = A.size();
  Mat inv(n, std::vector<Rational>(n));
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<Rational> e(n);
    e[j] = 1;
    auto col = solve(A, e);
    for (std::size_t i = 0; i < n; ++i) inv[i][j] = col[i];
  }
  return inv;
}

// Direct GLS pieces at theta from the row-level design: X'KX, X'KY, the
// derivative of X'KX, the residuals and the profiled rss with its derivative.
struct DirectGls {
  Mat xkx, dxkx;
  std::vector<Rational> xky, beta;
  Rational rss, drss, shrink_sum;  // shrink_sum = sum over groups n / (1 + n theta)
};

DirectGls direct_gls(const DesignProblem& d, const Rational& theta) {
  const std::size_t p = d.p();
  DirectGls g;
  g.xkx = g.dxkx = Mat(p, std::vector<Rational>(p));
  g.xky = std::vector<Rational>(p);
  std::size_t row = 0;
  std::vector<std::pair<std::size_t, int>> spans;
  for (int n : d.group_sizes) {
    std::vector<Rational> xs(p);
    Rational ys = 0, den = 1 + Rational(n) * theta;
    for (int k = 0; k < n; ++k) {
      for (std::size_t a = 0; a < p; ++a) {
        xs[a] += d.X[row + k][a];
        g.xky[a] += d.X[row + k][a] * d.Y[row + k];
        for (std::size_t b = 0; b < p; ++b) g.xkx[a][b] += d.X[row + k][a] * d.X[row + k][b];
      }
      ys += d.Y[row + k];
    }
    for (std::size_t a = 0; a < p; ++a) {
      g.xky[a] -= theta / den * xs[a] * ys;
      for (std::size_t b = 0; b < p; ++b) {
        g.xkx[a][b] -= theta / den * xs[a] * xs[b];
        g.dxkx[a][b] -= xs[a] * xs[b] / (den * den);
      }
    }
    g.shrink_sum += Rational(n) / den;
    spans.emplace_back(row, n);
    row += n;
  }
  g.beta = solve(g.xkx, g.xky);
  for (auto [start, n] : spans) {
    Rational den = 1 + Rational(n) * theta, sum = 0;
    for (int k = 0; k < n; ++k) {
      Rational r = d.Y[start + k];
      for (std::size_t a = 0; a < p; ++a) r -= d.X[start + k][a] * g.beta[a];
      g.rss += r * r;
      sum += r;
    }
    g.rss -= theta / den * sum * sum;
    g.drss -= sum * sum / (den * den);
  }
  return g;
}

}  // namespace

TEST(Covariates, InterceptOnlyReducesToOneWay) {
  std::mt19937_64 rng(41);
  for (int t = 0; t < 25; ++t) {
    auto groups = testing_support::random_groups(rng, static_cast<int>(draw(rng, 2, 6)), 1, 7);
    OneWayStats s = summarize(GroupedData{groups});
    DesignProblem d = DesignProblem::from_grouped(groups, {}, true);
    EXPECT_TRUE(testing_support::positively_proportional(ml_equation_x(d).numerator, ml_equation(s).numerator));
    EXPECT_TRUE(
        testing_support::positively_proportional(reml_equation_x(d).numerator, reml_equation(s).numerator));
  }
}

TEST(Covariates, GlsMatchesDirectSolve) {
  std::mt19937_64 rng(42);
  for (int t = 0; t < 10; ++t) {
    Instance in = random_instance(rng, static_cast<int>(draw(rng, 3, 6)), 2);
    DesignProblem d = DesignProblem::from_grouped(in.groups, in.cov, true);
    GlsProfile g = gls_profile(d);
    for (const char* th : {"0", "2/5", "3"}) {
      Rational theta = parse_rational(th);
      DirectGls ref = direct_gls(d, theta);
      Estimates e = estimates_at_x(g, RationalInterval(theta), Method::ML);
      ASSERT_EQ(e.beta.size(), d.p());
      for (std::size_t a = 0; a < d.p(); ++a) EXPECT_EQ(e.beta[a].lo, ref.beta[a]);
      EXPECT_EQ(g.P(theta) / g.D(theta), ref.rss);
      EXPECT_EQ(e.omega.lo, ref.rss / d.N());
    }
  }
}

TEST(Covariates, OrdinaryLeastSquaresAtZero) {
  std::mt19937_64 rng(43);
  Instance in = random_instance(rng, 4, 1);
  DesignProblem d = DesignProblem::from_grouped(in.groups, in.cov, true);
  GlsProfile g = gls_profile(d);
  // X'(Y - X beta) = 0 at theta = 0
  std::vector<Rational> beta;
  for (const auto& bn : g.beta_num) beta.push_back(bn(0) / g.delta(0));
  for (std::size_t a = 0; a < d.p(); ++a) {
    Rational s = 0;
    for (std::size_t i = 0; i < d.N(); ++i) {
      Rational r = d.Y[i];
      for (std::size_t b = 0; b < d.p(); ++b) r -= d.X[i][b] * beta[b];
      s += d.X[i][a] * r;
    }
    EXPECT_EQ(s, 0);
  }
}

TEST(Covariates, NumeratorsCarryTheScoreSign) {
  std::mt19937_64 rng(44);
  for (int t = 0; t < 10; ++t) {
    Instance in = random_instance(rng, static_cast<int>(draw(rng, 3, 5)), 1);
    DesignProblem d = DesignProblem::from_grouped(in.groups, in.cov, true);
    ProfileEquation ml = ml_equation_x(d), reml = reml_equation_x(d);
    const Rational N = static_cast<long>(d.N()), p = static_cast<long>(d.p());
    for (const char* th : {"0", "1/3", "5/2", "20"}) {
      Rational theta = parse_rational(th);
      DirectGls ref = direct_gls(d, theta);
      Rational ml_score = -N * ref.drss / ref.rss - ref.shrink_sum;
      // d/dtheta log det X'KX = trace(inverse(X'KX) * derivative)
      Mat inv = inverse(ref.xkx);
      Rational trace = 0;
      for (std::size_t a = 0; a < d.p(); ++a) {
        for (std::size_t b = 0; b < d.p(); ++b) trace += inv[a][b] * ref.dxkx[b][a];
      }
      Rational reml_score = -(N - p) * ref.drss / ref.rss - ref.shrink_sum - trace;
      if (ml_score != 0) {
        EXPECT_EQ(sign_at(ml.numerator, theta), sgn(ml_score));
      }
      if (reml_score != 0) {
        EXPECT_EQ(sign_at(reml.numerator, theta), sgn(reml_score));
      }
    }
  }
}

TEST(Covariates, DegreeBoundIsCarried) {
  std::mt19937_64 rng(45);
  for (int t = 0; t < 10; ++t) {
    int q = static_cast<int>(draw(rng, 3, 6));
    Instance in = random_instance(rng, q, 1);
    DesignProblem d = DesignProblem::from_grouped(in.groups, in.cov, true);
    ProfileEquation ml = ml_equation_x(d), reml = reml_equation_x(d);
    EXPECT_TRUE(ml.degree_is_bound);
    EXPECT_EQ(ml.expected_degree, 3 * q - 3);
    EXPECT_EQ(reml.expected_degree, 2 * q - 3);
  }
}

TEST(Covariates, FitAgreesWithCovariateFreeFit) {
  std::mt19937_64 rng(46);
  auto groups = testing_support::random_groups(rng, 5, 2, 6);
  OneWayStats s = summarize(GroupedData{groups});
  DesignProblem d = DesignProblem::from_grouped(groups, {}, true);
  const Rational w = pow10(-12);
  for (Method m : {Method::ML, Method::REML}) {
    FitReport a = fit_x(d, m, w);
    FitReport b = m == Method::ML ? ml_fit(s, w) : reml_fit(s, w);
    EXPECT_NEAR(a.global.theta.approx(), b.global.theta.approx(), 1e-11);
    EXPECT_NEAR(a.global.beta[0].approx(), b.global.mu().approx(), 1e-9);
    EXPECT_NEAR(a.global.omega.approx(), b.global.omega.approx(), 1e-9);
  }
}

TEST(Covariates, FlatRestrictedProfileIsDegenerate) {
  // two groups of sizes 1 and 2 with two fixed effects leave one residual
  // contrast, whose variance cannot separate theta from omega
  std::vector<std::vector<Rational>> groups{{Rational(1)}, {Rational(2), Rational(5)}};
  std::vector<std::vector<std::vector<Rational>>> cov{{{Rational(1)}}, {{Rational(3)}, {Rational(-2)}}};
  EXPECT_THROW(reml_equation_x(DesignProblem::from_grouped(groups, cov, true)), DegenerateDataError);
}

TEST(Covariates, RejectsRankDeficientDesign) {
  std::mt19937_64 rng(47);
  Instance in = random_instance(rng, 4, 1);
  for (auto& g : in.cov) {
    for (auto& x : g) x = {Rational(2)};
  }
  EXPECT_THROW(gls_profile(DesignProblem::from_grouped(in.groups, in.cov, true)), ModelAssumptionError);
  EXPECT_THROW(gls_profile(DesignProblem::from_grouped({{Rational(1), Rational(2)}}, {}, true)), ModelAssumptionError);
}
