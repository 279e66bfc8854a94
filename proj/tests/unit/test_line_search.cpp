#include <cmath>

#include <gtest/gtest.h>

#include "grasseig/errors.hpp"
#include "grasseig/line_search.hpp"
#include "oracles.hpp"

using namespace grasseig;

TEST(ScalarMinimize, Parabola) {
  const LineSearchResult r = scalar_minimize([](double t) { return (t - 0.3) * (t - 0.3); });
  EXPECT_NEAR(r.arg, 0.3, 1e-10);
  EXPECT_LE(r.value, 1e-20);
  EXPECT_FALSE(r.hit_max_evals);
  EXPECT_LE(r.evals, 200);
}

TEST(ScalarMinimize, MonotoneDecreasingPicksRightEnd) {
  const LineSearchResult r = scalar_minimize([](double t) { return -t; });
  EXPECT_EQ(r.arg, 1.0);
  EXPECT_EQ(r.value, -1.0);
}

TEST(ScalarMinimize, MonotoneIncreasingPicksLeftEnd) {
  LineSearchConfig cfg;
  cfg.lo = -2.0;
  cfg.hi = 5.0;
  const LineSearchResult r = scalar_minimize([](double t) { return std::exp(t); }, cfg);
  EXPECT_EQ(r.arg, -2.0);
}

TEST(ScalarMinimize, TiesGoToSmallerArgument) {
  const LineSearchResult r = scalar_minimize([](double) { return 4.0; });
  EXPECT_EQ(r.arg, 0.0);
  EXPECT_EQ(r.value, 4.0);
}

TEST(ScalarMinimize, DegenerateInterval) {
  LineSearchConfig cfg;
  cfg.lo = cfg.hi = 0.25;
  const LineSearchResult r = scalar_minimize([](double t) { return t * t; }, cfg);
  EXPECT_EQ(r.arg, 0.25);
  EXPECT_EQ(r.evals, 1);
}

TEST(ScalarMinimize, HitMaxEvals) {
  LineSearchConfig cfg;
  cfg.max_evals = 40;
  cfg.tol = 1e-14;
  const LineSearchResult r = scalar_minimize([](double t) { return (t - 0.3) * (t - 0.3); }, cfg);
  EXPECT_TRUE(r.hit_max_evals);
  EXPECT_LE(r.evals, 41);
  EXPECT_NEAR(r.arg, 0.3, 2.0 / 32);
}

TEST(ScalarMinimize, RejectsBadConfig) {
  LineSearchConfig cfg;
  cfg.tol = 0.0;
  EXPECT_THROW(scalar_minimize([](double t) { return t; }, cfg), DomainError);
  cfg.tol = 1e-10;
  cfg.lo = 1.0;
  cfg.hi = 0.0;
  EXPECT_THROW(scalar_minimize([](double t) { return t; }, cfg), DomainError);
}

TEST(ScalarMinimize, TrigonometricMatchesGrid) {
  // Sums of sin^2 / cos^2 terms, the shape of f along a geodesic.
  for (int s = 0; s < 10; ++s) {
    const double a = 1.0 + 0.3 * s;
    const double b = 0.5 + 0.17 * s;
    const double w1 = 1.0 + 0.1 * s;
    const double w2 = 2.3 - 0.05 * s;
    auto g = [&](double t) {
      return -a * std::pow(std::cos(w1 * t), 2) - b * std::pow(std::sin(w2 * t + 0.4), 2);
    };
    auto dg = [&](double t) {
      return a * w1 * std::sin(2.0 * w1 * t) - b * w2 * std::sin(2.0 * (w2 * t + 0.4));
    };
    LineSearchConfig cfg;
    cfg.hi = 2.0;
    const double ref = oracle::grid_argmin(g, 0.0, 2.0, 1000001);
    EXPECT_NEAR(scalar_minimize(g, cfg).arg, ref, 1e-5) << s;
    EXPECT_NEAR(scalar_minimize(g, cfg, dg).arg, ref, 1e-5) << s;
  }
}

TEST(ScalarMinimize, PolishSharpensFlatMinimum) {
  // Near a flat minimizer function values stop resolving the argument; the
  // derivative polish recovers it.
  auto g = [](double t) { return std::pow(t - 0.4321, 2) + 1e3; };
  auto dg = [](double t) { return 2.0 * (t - 0.4321); };
  const LineSearchResult r = scalar_minimize(g, {}, dg);
  EXPECT_NEAR(r.arg, 0.4321, 1e-9);
}
