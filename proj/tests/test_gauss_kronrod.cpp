#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <numeric>
#include <valarray>

#include "test_support.hpp"

using namespace solarquad;

TEST(GKPair, TableInvariants) {
  constexpr GKPair p = gk7_15();
  EXPECT_NEAR(std::accumulate(p.kronrod_weights.begin(), p.kronrod_weights.end(), 0.0), 2.0, 1e-14);
  EXPECT_NEAR(std::accumulate(p.gauss_weights.begin(), p.gauss_weights.end(), 0.0), 2.0, 1e-14);
  for (std::size_t i = 0; i < 15; ++i) {
    EXPECT_GT(p.kronrod_weights[i], 0.0);
    EXPECT_EQ(p.kronrod_nodes[i], -p.kronrod_nodes[14 - i]);
    EXPECT_EQ(p.kronrod_weights[i], p.kronrod_weights[14 - i]);
    if (i) {
      EXPECT_LT(p.kronrod_nodes[i - 1], p.kronrod_nodes[i]);
    }
  }
  for (std::size_t i = 0; i < 7; ++i) {
    EXPECT_GT(p.gauss_weights[i], 0.0);
    EXPECT_EQ(p.gauss_nodes[i], -p.gauss_nodes[6 - i]);
    EXPECT_NE(std::find(p.kronrod_nodes.begin(), p.kronrod_nodes.end(), p.gauss_nodes[i]), p.kronrod_nodes.end());
  }
  // Gauss nodes are the roots of P_7.
  const auto [x, w] = solarquad::testing::gauss_legendre(7);
  for (std::size_t i = 0; i < 7; ++i) {
    EXPECT_NEAR(p.gauss_nodes[i], x[i], 1e-15);
    EXPECT_NEAR(p.gauss_weights[i], w[i], 1e-15);
  }
}

TEST(GK15, Constant) {
  const auto r = gk15([](double) { return 1.0; }, -1.0, 1.0);
  EXPECT_NEAR(r.estimate, 2.0, 1e-15);
  EXPECT_LE(r.error_bound, 1e-14);
}

TEST(GK15, Quadratic) {
  const auto r = gk15([](double x) { return x * x; }, 0.0, 1.0);
  EXPECT_NEAR(r.estimate, 1.0 / 3.0, 1e-14);
  EXPECT_LE(r.error_bound, 1e-15);
}

TEST(GK15, RungeWithinBound) {
  const auto r = gk15([](double x) { return 1.0 / (1.0 + 25.0 * x * x); }, 0.0, 1.0);
  const double exact = std::atan(5.0) / 5.0;
  EXPECT_NEAR(exact, 0.274680153389003, 1e-14);
  EXPECT_LE(std::abs(r.estimate - exact), r.error_bound);
}

TEST(GK15, MonomialExactness) {
  for (int d = 0; d <= 22; ++d) {
    const auto r = gk15([d](double x) { return std::pow(x, d); }, -1.0, 1.0);
    const double exact = d % 2 ? 0.0 : 2.0 / (d + 1);
    EXPECT_LE(std::abs(r.estimate - exact), 1e-13 * std::max(1.0, exact)) << d;
    // The embedded Gauss rule is exact through degree 13, so the two agree.
    if (d <= 13) {
      EXPECT_LE(r.error_bound, 1e-13 * std::max(1.0, exact)) << d;
    }
  }
  const auto r = gk15([](double x) { return std::pow(x, 14); }, -1.0, 1.0);
  EXPECT_GT(r.error_bound, 1e-6);
}

TEST(GK15, NonFiniteIntegrand) {
  try {
    gk15([](double x) { return x == 0.0 ? std::nan("") : 1.0; }, -1.0, 1.0);
    FAIL() << "expected EvaluationError";
  } catch (const EvaluationError& e) {
    EXPECT_EQ(e.abscissa(), 0.0);
  }
}

TEST(AdaptiveIntegrate, ConstantOverBreakpoints) {
  const std::vector<double> bp{0.0, 1.0, 2.0};
  const auto r = adaptive_integrate([](double) { return 1.0; }, bp);
  EXPECT_NEAR(r.value, 2.0, 1e-15);
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.evaluations, 30u);  // exactly the two breakpoint intervals
}

TEST(AdaptiveIntegrate, InputValidation) {
  const auto one = [](double) { return 1.0; };
  EXPECT_THROW(adaptive_integrate(one, std::vector<double>{1.0}), DomainError);
  EXPECT_THROW(adaptive_integrate(one, std::vector<double>{0.0, 2.0, 1.0}), DomainError);
  EXPECT_THROW(adaptive_integrate(one, std::vector<double>{0.0, 1.0}, {0.0, 1e-10}), DomainError);
  EXPECT_THROW(adaptive_integrate(one, std::vector<double>{0.0, 1.0}, {1e-10, -1.0}), DomainError);
}

TEST(AdaptiveIntegrate, BudgetExhaustedIsNotAnException) {
  const std::vector<double> bp{0.0, 1.0};
  const auto r = adaptive_integrate([](double x) { return std::sqrt(std::abs(x - 1.0 / 3.0)); }, bp,
                                    {1e-15, 1e-300, 600});
  EXPECT_FALSE(r.converged);
  EXPECT_LE(r.evaluations, 600u);
  EXPECT_GT(r.error_estimate, 0.0);
}

TEST(AdaptiveIntegrate, NarrowSegmentsAreNotSplit) {
  // A jump off the breakpoints can never meet 1e-15; bisection stops at the
  // width guard and the budget ends the run.
  const std::vector<double> bp{0.0, 1.0};
  const auto r = adaptive_integrate([](double x) { return x < 1.0 / 3.0 ? 1.0 : 0.0; }, bp, {1e-15, 1e-300, 20000});
  EXPECT_FALSE(r.converged);
  EXPECT_NEAR(r.value, 1.0 / 3.0, 1e-11);
}

TEST(AdaptiveIntegrate, Additivity) {
  const auto f = [](double x) { return std::exp(std::sin(5.0 * x)) / (1.0 + x * x); };
  const IntegrationOptions opts{1e-12};
  const auto whole = adaptive_integrate(f, std::vector<double>{0.0, 3.0}, opts);
  const auto left = adaptive_integrate(f, std::vector<double>{0.0, 1.3}, opts);
  const auto right = adaptive_integrate(f, std::vector<double>{1.3, 3.0}, opts);
  EXPECT_LE(std::abs(whole.value - (left.value + right.value)),
            whole.error_estimate + left.error_estimate + right.error_estimate);
}

TEST(AdaptiveIntegrate, AffineInvariance) {
  const auto f = [](double x) { return std::cos(3.0 * x) * std::exp(-0.1 * x); };
  const double a = 0.5, b = 7.25, s = 2.5, t = -1.75;
  const auto direct = adaptive_integrate(f, std::vector<double>{a, b}, {1e-14});
  const auto mapped = adaptive_integrate([&](double y) { return s * f(s * y + t); },
                                         std::vector<double>{(a - t) / s, (b - t) / s}, {1e-14});
  EXPECT_LE(std::abs(direct.value - mapped.value), 1e-13 * std::abs(direct.value));
}

TEST(AdaptiveIntegrate, BatchedMatchesScalar) {
  const std::vector<double> bp{0.0, 0.5, 2.0};
  const auto batch = adaptive_integrate(
      [](double x) {
        return std::valarray<double>{std::sin(x), x * x, std::exp(x)};
      },
      bp, {1e-13});
  EXPECT_TRUE(batch.converged);
  EXPECT_NEAR(batch.value[0], 1.0 - std::cos(2.0), 1e-13);
  EXPECT_NEAR(batch.value[1], 8.0 / 3.0, 1e-13);
  EXPECT_NEAR(batch.value[2], std::exp(2.0) - 1.0, 1e-12);
}

// Per-interval exact integral of the squared cubic pieces of the solar model.
static double piecewise_sextic_integral(const CubicSpline& sp) {
  double total = 0.0;
  for (std::size_t i = 0; i < sp.pieces().size(); ++i) {
    const auto& c = sp.pieces()[i];
    const double h = sp.knots()[i + 1] - sp.knots()[i];
    double sq[7] = {};
    for (int p = 0; p < 4; ++p)
      for (int q = 0; q < 4; ++q) sq[p + q] += c[p] * c[q];
    double hp = h, piece = 0.0;
    for (int k = 0; k < 7; ++k, hp *= h) piece += sq[k] * hp / (k + 1);
    total += piece;
  }
  return total;
}

TEST(AdaptiveIntegrate, SolarWeightMatchesClosedForm) {
  const auto& m = solarquad::testing::astm_full();
  const auto r = adaptive_integrate([&m](double x) { return m(x); }, m.knots(), {1e-11});
  EXPECT_TRUE(r.converged);
  const double exact = piecewise_sextic_integral(m.sqrt_spline());
  EXPECT_LE(std::abs(r.value - exact), 1e-10 * exact);
  EXPECT_NEAR(exact, 1000.0, 5.0);
}

TEST(AdaptiveIntegrate, SolarOscillatoryOracleIsStable) {
  const auto& m = solarquad::testing::astm_full();
  const auto f = [&m](double x) { return std::sin(2.0 * std::numbers::pi * x / 50.0) * m(x); };
  const auto a = adaptive_integrate(f, m.knots(), {1e-13, 1e-12});
  const auto b = adaptive_integrate(f, m.knots(), {0.5e-13, 1e-12});
  EXPECT_TRUE(a.converged);
  EXPECT_TRUE(b.converged);
  EXPECT_LE(std::abs(a.value - b.value), 1e-12 * std::abs(a.value));
}

TEST(AdaptiveIntegrate, ErrorEstimateIsSoundOnTestIntegrands) {
  const auto& m = solarquad::testing::astm_full();
  for (double period : {500.0, 50.0}) {
    const auto f = [&m, period](double x) { return std::sin(2.0 * std::numbers::pi * x / period) * m(x); };
    const auto reference = adaptive_integrate(f, m.knots(), {1e-13, 1e-12});
    const std::vector<double> coarse_bp{280.0, 1000.0, 2500.0, 4000.0};
    for (double tol : {1e-3, 1e-5, 1e-7}) {
      const auto r = adaptive_integrate(f, coarse_bp, {tol, 1e-300});
      EXPECT_LE(std::abs(r.value - reference.value), 10.0 * r.error_estimate) << period << " " << tol;
    }
  }
}
