#include "grasseig/rayleigh.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Cholesky>

#include "grasseig/errors.hpp"

namespace grasseig {

SpectralParams derive_params(const EigenvalueSummary& s) {
  SpectralParams out;
  out.lambda1 = s.lambda1;
  out.lambdaP = s.lambdaP;
  out.lambdaP1 = s.lambdaP1;
  out.lambdaN = s.lambdaN;
  if (!(s.lambda1 >= s.lambdaP && s.lambdaP >= s.lambdaP1 && s.lambdaP1 >= s.lambdaN)) {
    throw DomainError("eigenvalue summary is not ordered descending");
  }
  out.delta = s.lambdaP - s.lambdaP1;
  out.mu = 2.0 * kCQ * out.delta;
  out.gamma = 2.0 * (s.lambda1 - s.lambdaN);
  out.gammaTilde = 1.25 * out.gamma;
  out.degenerate = !(out.delta > 0.0);
  out.kappaR = out.degenerate ? std::numeric_limits<double>::infinity()
                              : (s.lambda1 - s.lambdaN) / out.delta;
  out.negative_lambda_n = s.lambdaN < 0.0;
  return out;
}

SpectralParams derive_params(std::span<const double> descending, Index p) {
  return derive_params(summarize_eigenvalues(descending, p));
}

SpectralParams derive_params(const DenseSpectrum& spectrum, Index p) {
  const Vector& ev = spectrum.eigenvalues;
  return derive_params(std::span<const double>(ev.data(), static_cast<std::size_t>(ev.size())), p);
}

// ---------------------------------------------------------------------------

double f_from_product(const SubspacePoint& x, const Eigen::Ref<const Matrix>& ax) {
  if (ax.rows() != x.n() || ax.cols() != x.p()) throw ShapeError("f_from_product: shape mismatch");
  return -(x.rep().array() * ax.array()).sum();
}

double f_value(const SymmetricOperator& a, const SubspacePoint& x) {
  return f_from_product(x, a.apply_block(x.rep()));
}

Gradient grad_from_product(const SubspacePoint& x, Matrix ax) {
  if (ax.rows() != x.n() || ax.cols() != x.p()) throw ShapeError("grad: shape mismatch");
  const Matrix& xr = x.rep();
  const Matrix xtax = xr.transpose() * ax;
  Matrix g = -2.0 * (ax - xr * xtax);
  const double f = -xtax.trace();
  return {TangentVector::trusted(x, std::move(g)), std::move(ax), f};
}

Gradient grad(const SymmetricOperator& a, const SubspacePoint& x) {
  return grad_from_product(x, a.apply_block(x.rep()));
}

double hessian_quadform(const SymmetricOperator& a, const TangentVector& g, const Matrix* ax) {
  const SubspacePoint& x = g.base();
  const Matrix axm = ax ? *ax : a.apply_block(x.rep());
  const Matrix xtax = x.rep().transpose() * axm;
  const Matrix ag = a.apply_block(g.mat());
  return 2.0 * (g.mat().array() * (g.mat() * xtax - ag).array()).sum();
}

// ---------------------------------------------------------------------------

GeodesicCoeffs restrict_to_geodesic(const SymmetricOperator& a, const TangentVector& p,
                                    const Matrix* ax) {
  const SubspacePoint& x = p.base();
  if (a.size() != x.n()) throw ShapeError("restrict_to_geodesic: operator size mismatch");
  CompactSvd s = p.svd();
  if (s.sigma.size() > 0) {
    const double cut = kRotationCutoff * s.sigma.maxCoeff();
    for (Index i = 0; i < s.sigma.size(); ++i)
      if (s.sigma(i) <= cut) s.sigma(i) = 0.0;
  }
  GeodesicCoeffs c{x, s.sigma, s.v, s.u, {}, {}, {}, {}, {}, {}};
  c.xv = x.rep() * c.v;
  c.axv = (ax ? *ax : a.apply_block(x.rep())) * c.v;
  c.au = a.apply_block(c.u);
  // beta from the residual (I - XX^T) AX: a rounding-level component of U along
  // X would otherwise pick up the full size of X^T A X (e.g. a large shift)
  const Matrix rv = c.axv - x.rep() * (x.rep().transpose() * c.axv);
  const Index np = x.p();
  c.alpha.resize(np);
  c.beta.resize(np);
  c.gamma.resize(np);
  for (Index i = 0; i < np; ++i) {
    c.alpha(i) = c.xv.col(i).dot(c.axv.col(i));
    c.beta(i) = rv.col(i).dot(c.u.col(i));
    c.gamma(i) = c.u.col(i).dot(c.au.col(i));
  }
  return c;
}

double eval_along_delta(const GeodesicCoeffs& c, double eta) {
  double acc = 0.0;
  for (Index i = 0; i < c.sigma.size(); ++i) {
    const double t = eta * c.sigma(i);
    const double sn = std::sin(t);
    acc += sn * sn * (c.gamma(i) - c.alpha(i)) + std::sin(2.0 * t) * c.beta(i);
  }
  return -acc;
}

double eval_along(const GeodesicCoeffs& c, double eta) {
  return -c.alpha.sum() + eval_along_delta(c, eta);
}

double eval_along_deriv(const GeodesicCoeffs& c, double eta) {
  double acc = 0.0;
  for (Index i = 0; i < c.sigma.size(); ++i) {
    const double s = c.sigma(i);
    const double t = 2.0 * eta * s;
    acc += s * ((c.alpha(i) - c.gamma(i)) * std::sin(t) - 2.0 * c.beta(i) * std::cos(t));
  }
  return acc;
}

double eval_along_second(const GeodesicCoeffs& c, double eta) {
  double acc = 0.0;
  for (Index i = 0; i < c.sigma.size(); ++i) {
    const double s = c.sigma(i);
    const double t = 2.0 * eta * s;
    acc += 2.0 * s * s * ((c.alpha(i) - c.gamma(i)) * std::cos(t) + 2.0 * c.beta(i) * std::sin(t));
  }
  return acc;
}

namespace {

Matrix combine_rotation(const Matrix& left, const Matrix& right, const GeodesicCoeffs& c,
                        double eta) {
  const Vector co = (eta * c.sigma).array().cos();
  const Vector si = (eta * c.sigma).array().sin();
  return (left * co.asDiagonal() + right * si.asDiagonal()) * c.v.transpose();
}

Matrix combine_velocity(const Matrix& left, const Matrix& right, const GeodesicCoeffs& c,
                        double eta) {
  const Vector co = (c.sigma.array() * (eta * c.sigma).array().cos()).matrix();
  const Vector si = (c.sigma.array() * (eta * c.sigma).array().sin()).matrix();
  return (right * co.asDiagonal() - left * si.asDiagonal()) * c.v.transpose();
}

}  // namespace

Matrix geodesic_rep(const GeodesicCoeffs& c, double eta) {
  return combine_rotation(c.xv, c.u, c, eta);
}

Matrix reuse_AY(const GeodesicCoeffs& c, double eta) {
  return combine_rotation(c.axv, c.au, c, eta);
}

Matrix geodesic_velocity(const GeodesicCoeffs& c, double eta) {
  return combine_velocity(c.xv, c.u, c, eta);
}

Matrix reuse_A_velocity(const GeodesicCoeffs& c, double eta) {
  return combine_velocity(c.axv, c.au, c, eta);
}

GeodesicPoint point_along(const GeodesicCoeffs& c, double eta) {
  ThinQr qr = thin_qr(geodesic_rep(c, eta));
  Matrix ay = right_solve_upper(reuse_AY(c, eta), qr.r);
  return {SubspacePoint::trusted(std::move(qr.q)), std::move(ay), std::move(qr.r)};
}

// ---------------------------------------------------------------------------

RetractionRestriction restrict_to_retraction(const SubspacePoint& y,
                                             const Eigen::Ref<const Matrix>& ay,
                                             const Eigen::Ref<const Matrix>& g,
                                             const Eigen::Ref<const Matrix>& ag) {
  const Matrix& yr = y.rep();
  const Matrix m0 = yr.transpose() * ay;
  // Y^T A G through the residual, as in restrict_to_geodesic
  const Matrix b = (ay - yr * m0).transpose() * g;
  RetractionRestriction r;
  r.f0 = -m0.trace();
  r.s = b + b.transpose();
  r.k = g.transpose() * g;
  r.d = g.transpose() * ag - r.k * m0;
  return r;
}

double retraction_delta(const RetractionRestriction& r, double eta) {
  const Index p = r.k.rows();
  const Matrix n = Matrix::Identity(p, p) + eta * eta * r.k;
  const Matrix e = -eta * r.s + eta * eta * r.d;
  return -Eigen::LLT<Matrix>(n).solve(e).trace();
}

double retraction_deriv(const RetractionRestriction& r, double eta) {
  const Index p = r.k.rows();
  const Matrix n = Matrix::Identity(p, p) + eta * eta * r.k;
  const Eigen::LLT<Matrix> llt(n);
  const Matrix e = -eta * r.s + eta * eta * r.d;
  const Matrix de = -r.s + 2.0 * eta * r.d;
  const Matrix ninv_e = llt.solve(e);
  return -llt.solve(de).trace() + llt.solve(2.0 * eta * r.k * ninv_e).trace();
}

// ---------------------------------------------------------------------------

double weak_strong_factor(const SubspacePoint& x, const SubspacePoint& v_alpha) {
  const Vector theta = principal_angles(x, v_alpha);
  const double tp = theta.size() ? theta.maxCoeff() : 0.0;
  if (tp < 1e-8) return 1.0;
  return tp / std::tan(tp);
}

double weak_strong_gap(const SymmetricOperator& a, const SubspacePoint& x,
                       const SubspacePoint& v_alpha, const SpectralParams& params) {
  const Vector theta = principal_angles(x, v_alpha);
  if (theta.size() && !(theta.maxCoeff() < std::numbers::pi / 2 - 1e-12)) {
    throw DomainError("weak_strong_gap: largest principal angle reaches pi/2");
  }
  const Gradient g = grad(a, x);
  const double fstar = f_value(a, v_alpha);
  const TangentVector lg = log_map(x, v_alpha);
  const double av = weak_strong_factor(x, v_alpha);
  const double d = theta.norm();
  const double rhs = -inner(g.grad, lg) / av - 0.5 * params.mu * d * d;
  return rhs - (g.f - fstar);
}

double quadratic_growth_gap(const SymmetricOperator& a, const SubspacePoint& x,
                            const SubspacePoint& v_alpha, const SpectralParams& params) {
  const double fx = f_value(a, x);
  const double fstar = f_value(a, v_alpha);
  const double d = distance(x, v_alpha);
  return (fx - fstar) - params.cQ * params.delta * d * d;
}

}  // namespace grasseig
