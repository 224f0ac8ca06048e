#include <gtest/gtest.h>

#include "support.hpp"
#include "vcalg/io.hpp"

using namespace vcalg;
using testing_support::draw;

namespace {

const Rational kWidth = pow10(-12);

Rational positive(std::mt19937_64& rng) {
  Rational x(draw(rng, 1, 400), draw(rng, 1, 97));
  x.canonicalize();
  return x;
}

// Sums of squares that make (omega, tau1, tau2) a stationary point of the
// additive model, read off the score equations: S = E(KC - E)/C etc.
TwoWayStats plant_additive(int r, int q, int n, const Rational& omega, const Rational& tau1, const Rational& tau2) {
  TwoWayStats s;
  s.r = r;
  s.q = q;
  s.n = n;
  Rational E = omega, A = omega + Rational(q * n) * tau1, B = omega + Rational(r * n) * tau2;
  Rational C = A + Rational(r * n) * tau2;
  Rational K = r * q * n - r - q + 1;
  Rational S = E * (K * C - E) / C;
  s.SSA = A * (Rational(r - 1) * C + A) / C;
  s.SSB = B * (Rational(q - 1) * C + B) / C;
  if (n == 1) {
    s.SSAB = S;
  } else {
    // split the residual pool between interaction and error
    s.SSE = S / 2;
    s.SSAB = S - s.SSE;
  }
  return s;
}

// Same for the interaction model, with the error variance fixed at
// SSE / (rq(n-1)) and base eigenvalue omega + n tau12.
TwoWayStats plant_interaction(int r, int q, int n, const Rational& omega, const Rational& tau12,
                              const Rational& tau1, const Rational& tau2) {
  TwoWayStats s;
  s.r = r;
  s.q = q;
  s.n = n;
  s.SSE = omega * r * q * (n - 1);
  Rational E = omega + Rational(n) * tau12, A = E + Rational(q * n) * tau1, B = E + Rational(r * n) * tau2;
  Rational C = A + Rational(r * n) * tau2;
  Rational K = (r - 1) * (q - 1);
  s.SSAB = E * (K * C - E) / C;
  s.SSA = A * (Rational(r - 1) * C + A) / C;
  s.SSB = B * (Rational(q - 1) * C + B) / C;
  return s;
}

TwoWayStats random_stats(std::mt19937_64& rng, int n) {
  TwoWayStats s;
  s.r = static_cast<int>(draw(rng, 2, 8));
  s.q = static_cast<int>(draw(rng, 2, 8));
  s.n = n;
  s.SSA = positive(rng) * 10;
  s.SSB = positive(rng) * 10;
  s.SSAB = positive(rng);
  if (n > 1) s.SSE = positive(rng);
  return s;
}

bool contains_zero(const RationalInterval& iv) { return iv.lo <= 0 && iv.hi >= 0; }

}  // namespace

TEST(TwoWay, SumsOfSquaresMatchElementwiseDefinition) {
  std::mt19937_64 rng(51);
  for (int t = 0; t < 10; ++t) {
    int r = static_cast<int>(draw(rng, 2, 4)), q = static_cast<int>(draw(rng, 2, 4)),
        n = static_cast<int>(draw(rng, 1, 3));
    auto data = testing_support::random_twoway(rng, r, q, n);
    TwoWayStats s = twoway_stats(data.cells);
    const auto& y = data.cells;
    Rational grand = 0;
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < q; ++j)
        for (int k = 0; k < n; ++k) grand += y[i][j][k];
    grand /= r * q * n;
    auto row = [&](int i) {
      Rational m = 0;
      for (int j = 0; j < q; ++j)
        for (int k = 0; k < n; ++k) m += y[i][j][k];
      return Rational(m / (q * n));
    };
    auto col = [&](int j) {
      Rational m = 0;
      for (int i = 0; i < r; ++i)
        for (int k = 0; k < n; ++k) m += y[i][j][k];
      return Rational(m / (r * n));
    };
    auto cell = [&](int i, int j) {
      Rational m = 0;
      for (int k = 0; k < n; ++k) m += y[i][j][k];
      return Rational(m / n);
    };
    Rational ssa = 0, ssb = 0, ssab = 0, sse = 0, total = 0;
    for (int i = 0; i < r; ++i) {
      for (int j = 0; j < q; ++j) {
        for (int k = 0; k < n; ++k) {
          Rational a = row(i) - grand, b = col(j) - grand, ab = cell(i, j) - row(i) - col(j) + grand,
                   e = y[i][j][k] - cell(i, j), d = y[i][j][k] - grand;
          ssa += a * a;
          ssb += b * b;
          ssab += ab * ab;
          sse += e * e;
          total += d * d;
        }
      }
    }
    EXPECT_EQ(s.SSA, ssa);
    EXPECT_EQ(s.SSB, ssb);
    EXPECT_EQ(s.SSAB, ssab);
    EXPECT_EQ(s.SSE, sse);
    EXPECT_EQ(total, ssa + ssb + ssab + sse);
    EXPECT_EQ(s.grand_mean, grand);
  }
}

TEST(TwoWay, ConstantDataIsDegenerate) {
  std::vector<std::vector<std::vector<Rational>>> y(3, std::vector<std::vector<Rational>>(2, {Rational(4)}));
  TwoWayFitReport rep = fit_twoway(twoway_stats(y), TwoWayModel::additive, kWidth);
  EXPECT_TRUE(rep.system.degenerate);
  EXPECT_TRUE(rep.boundary);
  EXPECT_FALSE(rep.global.has_value());
}

TEST(TwoWay, PlantedAdditiveSolutionSurvives) {
  std::mt19937_64 rng(52);
  for (int t = 0; t < 20; ++t) {
    int r = static_cast<int>(draw(rng, 2, 7)), q = static_cast<int>(draw(rng, 2, 7)),
        n = static_cast<int>(draw(rng, 1, 3));
    Rational omega = positive(rng), tau1 = positive(rng), tau2 = positive(rng);
    TwoWayStats s = plant_additive(r, q, n, omega, tau1, tau2);
    TwoWaySystem sys = ml_system(s, TwoWayModel::additive);
    Elimination el = eliminate_to_quartic(sys);
    ASSERT_EQ(el.quartic.degree(), 4) << "trial " << t;
    EXPECT_EQ(el.quartic(omega), 0);
    ASSERT_TRUE(el.tau1.valid && el.tau2.valid);
    EXPECT_EQ(el.tau1.solve(RationalInterval(omega)).lo, tau1);
    EXPECT_EQ(el.tau2.solve(RationalInterval(omega)).lo, tau2);
    TwoWayFitReport rep = fit_twoway(s, TwoWayModel::additive, kWidth);
    bool found = false;
    for (const auto& sol : rep.solutions) {
      if (sol.v.lo <= omega && omega <= sol.v.hi) {
        found = true;
        EXPECT_TRUE(sol.feasible);
        EXPECT_TRUE(sol.tau1.contains(tau1));
        EXPECT_TRUE(sol.tau2.contains(tau2));
      }
    }
    EXPECT_TRUE(found);
  }
}

TEST(TwoWay, PlantedInteractionSolutionSurvives) {
  std::mt19937_64 rng(53);
  for (int t = 0; t < 20; ++t) {
    int r = static_cast<int>(draw(rng, 2, 6)), q = static_cast<int>(draw(rng, 2, 6)),
        n = static_cast<int>(draw(rng, 2, 4));
    Rational omega = positive(rng), tau12 = positive(rng), tau1 = positive(rng), tau2 = positive(rng);
    TwoWayStats s = plant_interaction(r, q, n, omega, tau12, tau1, tau2);
    TwoWaySystem sys = ml_system(s, TwoWayModel::interaction);
    ASSERT_TRUE(sys.omega_hat.has_value());
    EXPECT_EQ(*sys.omega_hat, omega);
    Elimination el = eliminate_to_quartic(sys);
    ASSERT_EQ(el.quartic.degree(), 4) << "trial " << t;
    EXPECT_EQ(el.quartic(tau12), 0);
    EXPECT_EQ(el.tau1.solve(RationalInterval(tau12)).lo, tau1);
    EXPECT_EQ(el.tau2.solve(RationalInterval(tau12)).lo, tau2);
  }
}

TEST(TwoWay, EliminantHasDegreeFourOnRandomInput) {
  std::mt19937_64 rng(54);
  for (int t = 0; t < 100; ++t) {
    TwoWayStats add = random_stats(rng, static_cast<int>(draw(rng, 1, 3)));
    EXPECT_EQ(eliminate_to_quartic(ml_system(add, TwoWayModel::additive)).quartic.degree(), 4) << "additive " << t;
    TwoWayStats inter = random_stats(rng, static_cast<int>(draw(rng, 2, 3)));
    EXPECT_EQ(eliminate_to_quartic(ml_system(inter, TwoWayModel::interaction)).quartic.degree(), 4)
        << "interaction " << t;
  }
}

TEST(TwoWay, ResidualEnclosuresContainZero) {
  std::mt19937_64 rng(55);
  for (int t = 0; t < 20; ++t) {
    TwoWayStats s = random_stats(rng, static_cast<int>(draw(rng, 1, 3)));
    TwoWayFitReport rep = fit_twoway(s, TwoWayModel::additive, kWidth);
    for (const auto& sol : rep.solutions) {
      if (!sol.loglik) continue;
      for (const auto& res : sol.residuals) EXPECT_TRUE(contains_zero(res));
    }
  }
}

TEST(TwoWay, AgreesWithNumericMaximizer) {
  std::mt19937_64 rng(56);
  for (int t = 0; t < 3; ++t) {
    auto data = testing_support::random_twoway(rng, 3, 3, 2);
    TwoWayFitReport rep = fit_twoway(twoway_stats(data.cells), TwoWayModel::additive, kWidth);
    auto x = testing_support::twoway_numeric_mle(data);
    if (!rep.global) {
      EXPECT_TRUE(x[1] < 1e-6 || x[2] < 1e-6);
      continue;
    }
    const auto& best = rep.solutions[*rep.global];
    EXPECT_NEAR(best.omega.approx(), static_cast<double>(x[0]), 1e-6);
    EXPECT_NEAR(best.tau1.approx(), static_cast<double>(x[1]), 1e-5);
    EXPECT_NEAR(best.tau2.approx(), static_cast<double>(x[2]), 1e-5);
  }
}

TEST(TwoWay, PenicillinSystem) {
  io::json j = io::parse_json(io::read_file(std::string(VCALG_FIXTURES) + "/penicillin_stats.json"));
  TwoWayStats s;
  s.r = j["r"];
  s.q = j["q"];
  s.n = j["n"];
  s.SSA = io::rational_from_json(j["SSA"], "SSA");
  s.SSB = io::rational_from_json(j["SSB"], "SSB");
  s.SSAB = io::rational_from_json(j["SSAB"], "SSAB");
  s.SSE = io::rational_from_json(j["SSE"], "SSE");
  TwoWayFitReport rep = fit_twoway(s, TwoWayModel::additive, kWidth);
  UniPoly quartic =
      testing_support::poly_of({139045932165, -1070402996440, 2545119731943, -1801205257140, 204808595904});
  EXPECT_TRUE(testing_support::proportional(rep.elimination.quartic, quartic));
  ASSERT_TRUE(rep.global.has_value());
  const auto& g = rep.solutions[*rep.global];
  EXPECT_NEAR(g.omega.approx(), 0.302425, 5e-7);
  EXPECT_NEAR(g.tau1.approx(), 0.714992, 5e-7);
  EXPECT_NEAR(g.tau2.approx(), 3.135188, 5e-7);
  int feasible = 0;
  for (const auto& sol : rep.solutions) feasible += sol.feasible;
  EXPECT_EQ(feasible, 1);
}

TEST(TwoWay, InteractionNeedsReplication) {
  TwoWayStats s;
  s.r = 3;
  s.q = 3;
  s.n = 1;
  s.SSA = 5;
  s.SSB = 6;
  s.SSAB = 2;
  EXPECT_THROW(ml_system(s, TwoWayModel::interaction), ModelAssumptionError);
  s.SSE = 1;
  EXPECT_THROW(ml_system(s, TwoWayModel::additive), InputError);
}
