#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "grasseig/errors.hpp"
#include "grasseig/grassmann.hpp"
#include "grasseig/rayleigh.hpp"
#include "oracles.hpp"

using namespace grasseig;
using std::numbers::pi;

namespace {

struct Instance {
  Matrix dense;
  SymmetricOperator op;
  SubspacePoint v_alpha;
  SpectralParams params;
};

// Random dense symmetric matrix; V_alpha and eigenvalues from an independent
// Eigen solve.
Instance instance(Index n, Index p, std::uint64_t seed) {
  const Matrix a = oracle::random_symmetric(n, seed);
  Eigen::SelfAdjointEigenSolver<Matrix> es(a);
  const Matrix v = es.eigenvectors().rightCols(p).rowwise().reverse();
  const Vector lam = es.eigenvalues().reverse();
  EigenvalueSummary s{lam(0), lam(p - 1), lam(p), lam(n - 1)};
  return {a, SymmetricOperator::dense(a), SubspacePoint(oracle::orthonormalize(v)), derive_params(s)};
}

double fd_along(const SymmetricOperator& a, const TangentVector& g, double t) {
  return oracle::rayleigh(a.to_dense(), exp_map(g.scaled(t)).rep());
}

}  // namespace

// ---------------------------------------------------------------------------
// parameters

TEST(DeriveParams, WorkedExample) {
  const std::vector<double> lam{4.0, 3.0, 1.0, 0.5};
  const SpectralParams p = derive_params(lam, 2);
  EXPECT_DOUBLE_EQ(p.lambda1, 4.0);
  EXPECT_DOUBLE_EQ(p.lambdaP, 3.0);
  EXPECT_DOUBLE_EQ(p.lambdaP1, 1.0);
  EXPECT_DOUBLE_EQ(p.lambdaN, 0.5);
  EXPECT_DOUBLE_EQ(p.delta, 2.0);
  EXPECT_DOUBLE_EQ(p.gamma, 7.0);
  EXPECT_DOUBLE_EQ(p.gammaTilde, 8.75);
  EXPECT_NEAR(p.mu, 16.0 / (pi * pi), 1e-15);
  EXPECT_NEAR(p.mu, 1.6211, 1e-4);
  EXPECT_DOUBLE_EQ(p.kappaR, 1.75);
  EXPECT_FALSE(p.degenerate);
  EXPECT_FALSE(p.negative_lambda_n);
}

TEST(DeriveParams, DegenerateAndNegative) {
  const std::vector<double> lam{2.0, 1.0, 1.0, -0.5};
  const SpectralParams p = derive_params(lam, 2);
  EXPECT_TRUE(p.degenerate);
  EXPECT_EQ(p.delta, 0.0);
  EXPECT_TRUE(p.negative_lambda_n);
}

TEST(DeriveParams, RangeChecked) {
  const std::vector<double> lam{2.0, 1.0};
  EXPECT_THROW(derive_params(lam, 0), DomainError);
  EXPECT_THROW(derive_params(lam, 2), DomainError);
}

// ---------------------------------------------------------------------------
// objective, gradient, Hessian

TEST(Objective, MatchesDenseTrace) {
  const Instance in = instance(15, 3, 1);
  const SubspacePoint x = random_point(15, 3, 2);
  EXPECT_NEAR(f_value(in.op, x), oracle::rayleigh(in.dense, x.rep()), 1e-12);
}

TEST(Objective, OptimumIsMinusSumOfTopEigenvalues) {
  const std::vector<double> d{5.0, 4.0, 2.0, 1.0, 0.0};
  const SymmetricOperator a = SymmetricOperator::diagonal(Eigen::Map<const Vector>(d.data(), 5));
  Matrix x = Matrix::Zero(5, 2);
  x(0, 0) = x(1, 1) = 1.0;
  EXPECT_DOUBLE_EQ(f_value(a, SubspacePoint(x)), -9.0);
  EXPECT_LT(grad(a, SubspacePoint(x)).grad.norm(), 1e-15);
}

TEST(Gradient, TangentAndCountsOneProduct) {
  const Instance in = instance(20, 4, 3);
  const SubspacePoint x = random_point(20, 4, 4);
  SymmetricOperator a = in.op.fresh();
  const Gradient g = grad(a, x);
  EXPECT_EQ(a.block_products(), 1u);
  EXPECT_LT((x.rep().transpose() * g.grad.mat()).norm(), 1e-12);
  const Matrix ref = -2.0 * (Matrix::Identity(20, 20) - x.rep() * x.rep().transpose()) * in.dense * x.rep();
  EXPECT_LT((g.grad.mat() - ref).norm(), 1e-11);
}

TEST(Gradient, MatchesFiniteDifference) {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const Instance in = instance(25, 3, 10 + s);
    const SubspacePoint x = random_point(25, 3, 20 + s);
    const TangentVector u = random_tangent(x, 1.0, 30 + s);
    const double fd = oracle::central_difference([&](double t) { return fd_along(in.op, u, t); }, 0.0, 1e-6);
    const double an = inner(grad(in.op, x).grad, u);
    EXPECT_LE(std::abs(fd - an), 1e-5 * std::max(1.0, std::abs(an)));
  }
}

TEST(Hessian, MatchesSecondDifference) {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const Instance in = instance(25, 3, 40 + s);
    const SubspacePoint x = random_point(25, 3, 50 + s);
    const TangentVector u = random_tangent(x, 1.0, 60 + s);
    const double fd = oracle::second_difference([&](double t) { return fd_along(in.op, u, t); }, 0.0, 1e-4);
    const double an = hessian_quadform(in.op, u);
    EXPECT_LE(std::abs(fd - an), 1e-4 * std::max(1.0, std::abs(an)));
  }
}

TEST(Hessian, BoundedByGamma) {
  for (std::uint64_t s = 0; s < 30; ++s) {
    const Instance in = instance(18, 4, 70 + s);
    const SubspacePoint x = random_point(18, 4, 80 + s);
    const TangentVector u = random_tangent(x, 0.5 + 0.1 * static_cast<double>(s), 90 + s);
    EXPECT_LE(std::abs(hessian_quadform(in.op, u)), in.params.gamma * u.mat().squaredNorm() + 1e-8);
  }
}

// ---------------------------------------------------------------------------
// geodesic restriction

TEST(Geodesic, ClosedFormOnGr21) {
  const SymmetricOperator a = SymmetricOperator::diagonal(Eigen::Vector2d(3.0, 1.0));
  Matrix x(2, 1), g(2, 1);
  x << 1, 0;
  g << 0, 1;
  const GeodesicCoeffs c = restrict_to_geodesic(a, TangentVector(SubspacePoint(x), g));
  for (double t : {0.0, 0.2, 0.7, 1.3, 2.5}) {
    const double ct = std::cos(t), st = std::sin(t);
    EXPECT_NEAR(eval_along(c, t), -(3.0 * ct * ct + st * st), 1e-14);
    EXPECT_NEAR(eval_along_delta(c, t), 2.0 * st * st, 1e-14);
    EXPECT_NEAR(eval_along_deriv(c, t), 4.0 * st * ct, 1e-14);
    EXPECT_NEAR(eval_along_second(c, t), 4.0 * std::cos(2.0 * t), 1e-14);
  }
}

TEST(Geodesic, EndpointsAndDerivatives) {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const Instance in = instance(30, 4, 100 + s);
    const SubspacePoint x = random_point(30, 4, 110 + s);
    const TangentVector u = random_tangent(x, 1.0, 120 + s);
    const GeodesicCoeffs c = restrict_to_geodesic(in.op, u);
    EXPECT_NEAR(eval_along(c, 0.0), f_value(in.op, x), 1e-11);
    EXPECT_NEAR(eval_along_delta(c, 0.0), 0.0, 1e-15);
    for (double t : {0.3, 0.9, 1.4}) {
      const double ft = oracle::rayleigh(in.dense, exp_map(u.scaled(t)).rep());
      EXPECT_NEAR(eval_along(c, t), ft, 1e-10);
      EXPECT_NEAR(eval_along_delta(c, t), ft - f_value(in.op, x), 1e-10);
      const double d1 = oracle::central_difference([&](double e) { return eval_along(c, e); }, t, 1e-6);
      EXPECT_NEAR(eval_along_deriv(c, t), d1, 1e-6 * std::max(1.0, std::abs(d1)));
      const double d2 = oracle::second_difference([&](double e) { return eval_along(c, e); }, t, 1e-4);
      EXPECT_NEAR(eval_along_second(c, t), d2, 1e-4 * std::max(1.0, std::abs(d2)));
    }
    EXPECT_NEAR(eval_along_deriv(c, 0.0), inner(grad(in.op, x).grad, u), 1e-10);
  }
}

TEST(Geodesic, ProductCounts) {
  const Instance in = instance(20, 3, 130);
  const SubspacePoint x = random_point(20, 3, 131);
  const TangentVector u = random_tangent(x, 1.0, 132);
  SymmetricOperator a = in.op.fresh();
  const GeodesicCoeffs c = restrict_to_geodesic(a, u);
  EXPECT_EQ(a.block_products(), 2u);
  const Matrix ax = a.apply_block(x.rep());
  a.reset_counter();
  const GeodesicCoeffs c2 = restrict_to_geodesic(a, u, &ax);
  EXPECT_EQ(a.block_products(), 1u);
  EXPECT_NEAR(eval_along(c, 0.8), eval_along(c2, 0.8), 1e-12);

  a.reset_counter();
  const Matrix ay = reuse_AY(c, 0.8);
  const Matrix av = reuse_A_velocity(c, 0.8);
  const GeodesicPoint pt = point_along(c, 0.8);
  EXPECT_EQ(a.block_products(), 0u);
  EXPECT_LT((ay - in.dense * geodesic_rep(c, 0.8)).norm(), 1e-11);
  EXPECT_LT((av - in.dense * geodesic_velocity(c, 0.8)).norm(), 1e-11);
  EXPECT_LT((pt.ay - in.dense * pt.y.rep()).norm(), 1e-11);
  EXPECT_LT(orthonormality_defect(pt.y.rep()), 1e-13);
  EXPECT_NEAR(distance(pt.y, exp_map(u.scaled(0.8))), 0.0, 1e-10);
}

TEST(Geodesic, VelocityMatchesDifference) {
  const Instance in = instance(20, 3, 140);
  const SubspacePoint x = random_point(20, 3, 141);
  const GeodesicCoeffs c = restrict_to_geodesic(in.op, random_tangent(x, 1.0, 142));
  const double h = 1e-6;
  const Matrix fd = (geodesic_rep(c, 0.5 + h) - geodesic_rep(c, 0.5 - h)) / (2.0 * h);
  EXPECT_LT((geodesic_velocity(c, 0.5) - fd).norm(), 1e-8);
}

TEST(Geodesic, InvariantUnderSvdFactorChoice) {
  // Repeated singular values leave U, V determined only up to a common
  // rotation of the repeated block.
  const Instance in = instance(12, 3, 150);
  const SubspacePoint x = random_point(12, 3, 151);
  const Matrix w = (Matrix::Identity(12, 12) - x.rep() * x.rep().transpose()) * oracle::gaussian(12, 3, 152);
  CompactSvd s{oracle::orthonormalize(w), Eigen::Vector3d(1.0, 1.0, 0.5), oracle::random_basis(3, 3, 153)};
  Matrix q = Matrix::Identity(3, 3);
  const double th = 0.7;
  q(0, 0) = q(1, 1) = std::cos(th);
  q(0, 1) = -std::sin(th);
  q(1, 0) = std::sin(th);
  CompactSvd s2{s.u * q, s.sigma, s.v * q};
  const TangentVector g1 = TangentVector::with_svd(x, s);
  const TangentVector g2 = TangentVector::with_svd(x, s2);
  ASSERT_LT((g1.mat() - g2.mat()).norm(), 1e-13);
  const GeodesicCoeffs c1 = restrict_to_geodesic(in.op, g1);
  const GeodesicCoeffs c2 = restrict_to_geodesic(in.op, g2);
  for (double t : {0.2, 0.6, 1.1}) {
    EXPECT_NEAR(eval_along(c1, t), eval_along(c2, t), 1e-12);
    EXPECT_NEAR(eval_along_deriv(c1, t), eval_along_deriv(c2, t), 1e-12);
    EXPECT_LT((geodesic_rep(c1, t) - geodesic_rep(c2, t)).norm(), 1e-12);
  }
}

TEST(Geodesic, ShiftOnlyMovesTheConstant) {
  const Instance in = instance(16, 3, 160);
  const SubspacePoint x = random_point(16, 3, 161);
  const TangentVector u = random_tangent(x, 1.0, 162);
  const GeodesicCoeffs c = restrict_to_geodesic(in.op, u);
  const GeodesicCoeffs cs = restrict_to_geodesic(shift(in.op, 10.0), u);
  for (double t : {0.0, 0.4, 1.2}) {
    EXPECT_NEAR(eval_along_delta(c, t), eval_along_delta(cs, t), 1e-12);
    EXPECT_NEAR(eval_along(cs, t), eval_along(c, t) - 30.0, 1e-10);
  }
  EXPECT_NEAR(eval_along_deriv(c, 0.0), eval_along_deriv(cs, 0.0), 1e-12);
}

// ---------------------------------------------------------------------------
// retraction restriction

TEST(Retraction, RestrictionMatchesDirectEvaluation) {
  for (std::uint64_t s = 0; s < 5; ++s) {
    const Instance in = instance(20, 3, 170 + s);
    const SubspacePoint y = random_point(20, 3, 180 + s);
    const Matrix ay = in.dense * y.rep();
    const Matrix g = random_tangent(y, 1.0, 190 + s).mat();
    const RetractionRestriction r = restrict_to_retraction(y, ay, g, in.dense * g);
    const double f0 = oracle::rayleigh(in.dense, y.rep());
    EXPECT_NEAR(r.f0, f0, 1e-12);
    for (double t : {0.0, 0.1, 0.5, 2.0}) {
      const Matrix q = oracle::orthonormalize(y.rep() - t * g);
      EXPECT_NEAR(retraction_delta(r, t), oracle::rayleigh(in.dense, q) - f0, 1e-11);
      const double d1 = oracle::central_difference([&](double e) { return retraction_delta(r, e); }, t, 1e-6);
      EXPECT_NEAR(retraction_deriv(r, t), d1, 1e-6 * std::max(1.0, std::abs(d1)));
    }
  }
}

// ---------------------------------------------------------------------------
// convexity certificates

TEST(Certificates, ZeroAtTheDominantSubspace) {
  const Instance in = instance(14, 3, 200);
  EXPECT_NEAR(quadratic_growth_gap(in.op, in.v_alpha, in.v_alpha, in.params), 0.0, 1e-11);
  EXPECT_NEAR(weak_strong_gap(in.op, in.v_alpha, in.v_alpha, in.params), 0.0, 1e-11);
  EXPECT_DOUBLE_EQ(weak_strong_factor(in.v_alpha, in.v_alpha), 1.0);
}

TEST(Certificates, HoldNearTheDominantSubspace) {
  for (std::uint64_t s = 0; s < 40; ++s) {
    const Instance in = instance(16, 3, 300 + s);
    const double r = 0.025 * static_cast<double>(s);
    const SubspacePoint x = perturb_within(in.v_alpha, r, 400 + s);
    EXPECT_GE(quadratic_growth_gap(in.op, x, in.v_alpha, in.params), -1e-10) << s;
    EXPECT_GE(weak_strong_gap(in.op, x, in.v_alpha, in.params), -1e-10) << s;
  }
}

TEST(Certificates, WeakStrongFactor) {
  // theta_p / tan(theta_p) for a single planar angle
  const double t = 0.6;
  Matrix a(2, 1), b(2, 1);
  a << 1, 0;
  b << std::cos(t), std::sin(t);
  EXPECT_NEAR(weak_strong_factor(SubspacePoint(b), SubspacePoint(a)), t / std::tan(t), 1e-13);
}
