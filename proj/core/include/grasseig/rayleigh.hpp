#pragma once

#include <numbers>
#include <optional>
#include <span>

#include "grasseig/grassmann.hpp"
#include "grasseig/matops.hpp"

namespace grasseig {

inline constexpr double kCQ = 4.0 / (std::numbers::pi * std::numbers::pi);

struct SpectralParams {
  double lambda1 = 0.0;
  double lambdaP = 0.0;
  double lambdaP1 = 0.0;
  double lambdaN = 0.0;
  double delta = 0.0;       // lambda_p - lambda_{p+1}
  double cQ = kCQ;
  double mu = 0.0;          // 2 cQ delta
  double gamma = 0.0;       // 2 (lambda_1 - lambda_n)
  double gammaTilde = 0.0;  // 5/4 gamma
  double kappaR = 0.0;      // (lambda_1 - lambda_n) / delta
  bool degenerate = false;         // delta == 0
  bool negative_lambda_n = false;  // shift A first for a PSD problem
};

SpectralParams derive_params(const EigenvalueSummary& s);
/// Throws DomainError unless 1 <= p < n.
SpectralParams derive_params(std::span<const double> descending, Index p);
SpectralParams derive_params(const DenseSpectrum& spectrum, Index p);

// ---------------------------------------------------------------------------
// f(X) = -Tr(X^T A X), grad f(X) = -2 (I - X X^T) A X

double f_value(const SymmetricOperator& a, const SubspacePoint& x);
double f_from_product(const SubspacePoint& x, const Eigen::Ref<const Matrix>& ax);

struct Gradient {
  TangentVector grad;
  Matrix ax;
  double f = 0.0;
};

Gradient grad(const SymmetricOperator& a, const SubspacePoint& x);
Gradient grad_from_product(const SubspacePoint& x, Matrix ax);

/// 2 <G, G X^T A X - A G>.
double hessian_quadform(const SymmetricOperator& a, const TangentVector& g,
                        const Matrix* ax = nullptr);

// ---------------------------------------------------------------------------
// f restricted to the geodesic eta -> Exp_X(eta P), P = U diag(s) V^T

struct GeodesicCoeffs {
  SubspacePoint base;
  Vector sigma;
  Matrix v;
  Matrix u;
  Matrix xv;        // X V
  Matrix axv;       // A X V
  Matrix au;        // A U
  Vector alpha;     // (V^T X^T A X V)_ii
  Vector beta;      // (V^T X^T A U)_ii
  Vector gamma;     // (U^T A U)_ii
};

/// Two block products, or one when A X is supplied.
GeodesicCoeffs restrict_to_geodesic(const SymmetricOperator& a, const TangentVector& p,
                                    const Matrix* ax = nullptr);

/// f(Exp_X(eta P)).
double eval_along(const GeodesicCoeffs& c, double eta);
/// f(Exp_X(eta P)) - f(X); free of the constant part, so it is insensitive
/// to spectral shifts in floating point.
double eval_along_delta(const GeodesicCoeffs& c, double eta);
double eval_along_deriv(const GeodesicCoeffs& c, double eta);
double eval_along_second(const GeodesicCoeffs& c, double eta);

/// Unnormalized geodesic representative X V cos(eta S) V^T + U sin(eta S) V^T.
Matrix geodesic_rep(const GeodesicCoeffs& c, double eta);
/// A times geodesic_rep(c, eta) without any block product.
Matrix reuse_AY(const GeodesicCoeffs& c, double eta);
/// d/d eta of geodesic_rep and its image under A.
Matrix geodesic_velocity(const GeodesicCoeffs& c, double eta);
Matrix reuse_A_velocity(const GeodesicCoeffs& c, double eta);

/// Geodesic point with an exactly orthonormal representative Y = rep R^{-1},
/// together with A Y and the triangular factor R.
struct GeodesicPoint {
  SubspacePoint y;
  Matrix ay;
  Matrix r;
};
GeodesicPoint point_along(const GeodesicCoeffs& c, double eta);

// ---------------------------------------------------------------------------
// f restricted to the QR retraction curve eta -> qf(Y - eta G) for a tangent
// G at Y: f = -Tr(N^{-1} M), M = (Y - eta G)^T A (Y - eta G),
// N = I + eta^2 G^T G.

struct RetractionRestriction {
  double f0 = 0.0;
  Matrix s;     // Y^T A G + G^T A Y
  Matrix d;     // G^T A G - G^T G Y^T A Y
  Matrix k;     // G^T G
};

RetractionRestriction restrict_to_retraction(const SubspacePoint& y,
                                             const Eigen::Ref<const Matrix>& ay,
                                             const Eigen::Ref<const Matrix>& g,
                                             const Eigen::Ref<const Matrix>& ag);
double retraction_delta(const RetractionRestriction& r, double eta);
double retraction_deriv(const RetractionRestriction& r, double eta);

// ---------------------------------------------------------------------------
// convexity certificates against the dominant subspace V_alpha

/// a(X) = theta_p / tan(theta_p), taken as 1 when theta_p < 1e-8.
double weak_strong_factor(const SubspacePoint& x, const SubspacePoint& v_alpha);

/// (1/a) <grad f(X), -Log_X(V_alpha)> - (mu/2) dist^2 - (f(X) - f*).
double weak_strong_gap(const SymmetricOperator& a, const SubspacePoint& x,
                       const SubspacePoint& v_alpha, const SpectralParams& params);

/// (f(X) - f*) - cQ delta dist^2.
double quadratic_growth_gap(const SymmetricOperator& a, const SubspacePoint& x,
                            const SubspacePoint& v_alpha, const SpectralParams& params);

}  // namespace grasseig
