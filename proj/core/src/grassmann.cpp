#include "grasseig/grassmann.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include <Eigen/LU>

#include "grasseig/errors.hpp"

namespace grasseig {

namespace {

constexpr double kOrthoTol = 1e-10;
constexpr double kHorizontalTol = 1e-10;

Matrix gaussian(Index rows, Index cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = normal(rng);
  return m;
}

void zero_small(Vector& sigma) {
  if (sigma.size() == 0) return;
  const double cut = kRotationCutoff * sigma.maxCoeff();
  for (Index i = 0; i < sigma.size(); ++i)
    if (sigma(i) <= cut) sigma(i) = 0.0;
}

void require_same_base(const TangentVector& g, const TangentVector& h) {
  if (&g.base().rep() != &h.base().rep() && g.base().rep() != h.base().rep()) {
    throw ShapeError("tangent vectors are based at different representatives");
  }
}

}  // namespace

// ---------------------------------------------------------------------------

SubspacePoint::SubspacePoint(Matrix rep, Trusted)
    : rep_(std::make_shared<const Matrix>(std::move(rep))) {}

SubspacePoint::SubspacePoint(Matrix rep) : SubspacePoint(std::move(rep), Trusted{}) {
  if (p() < 1 || p() > n()) {
    throw ShapeError("subspace point needs 1 <= p <= n, got " + std::to_string(n()) + " x " +
                     std::to_string(p()));
  }
  const double defect = orthonormality_defect(*rep_);
  if (!(defect <= kOrthoTol)) {
    throw DomainError("representative columns are not orthonormal (defect " +
                      std::to_string(defect) + ")");
  }
}

SubspacePoint SubspacePoint::trusted(Matrix rep) { return SubspacePoint(std::move(rep), Trusted{}); }

// ---------------------------------------------------------------------------

TangentVector::TangentVector(SubspacePoint base, Matrix g, std::shared_ptr<const CompactSvd> svd)
    : base_(std::move(base)), g_(std::move(g)), svd_(std::move(svd)) {}

TangentVector::TangentVector(SubspacePoint base, Matrix g)
    : TangentVector(std::move(base), std::move(g), nullptr) {
  if (g_.rows() != base_.n() || g_.cols() != base_.p()) {
    throw ShapeError("tangent vector shape does not match its base point");
  }
  const double defect = (base_.rep().transpose() * g_).norm();
  if (!(defect <= kHorizontalTol * std::max(1.0, g_.norm()))) {
    throw DomainError("matrix is not horizontal at the base point (||X^T G|| = " +
                      std::to_string(defect) + ")");
  }
}

TangentVector TangentVector::trusted(SubspacePoint base, Matrix g) {
  return TangentVector(std::move(base), std::move(g), nullptr);
}

TangentVector TangentVector::with_svd(SubspacePoint base, CompactSvd svd) {
  Matrix g = svd.reconstruct();
  return TangentVector(std::move(base), std::move(g),
                       std::make_shared<const CompactSvd>(std::move(svd)));
}

TangentVector TangentVector::zero(const SubspacePoint& base) {
  CompactSvd svd;
  // U is irrelevant when sigma = 0
  svd.u = Matrix::Zero(base.n(), base.p());
  svd.sigma = Vector::Zero(base.p());
  svd.v = Matrix::Identity(base.p(), base.p());
  return TangentVector(base, Matrix::Zero(base.n(), base.p()),
                       std::make_shared<const CompactSvd>(std::move(svd)));
}

CompactSvd TangentVector::svd() const {
  if (svd_) return *svd_;
  return compact_svd(g_);
}

double TangentVector::spectral_norm() const {
  if (svd_) return svd_->sigma.size() ? svd_->sigma.maxCoeff() : 0.0;
  return grasseig::spectral_norm(g_);
}

TangentVector TangentVector::scaled(double s) const {
  std::shared_ptr<const CompactSvd> svd;
  if (svd_) {
    CompactSvd c = *svd_;
    c.sigma *= std::abs(s);
    if (s < 0.0) c.u = -c.u;
    svd = std::make_shared<const CompactSvd>(std::move(c));
  }
  return TangentVector(base_, s * g_, std::move(svd));
}

TangentVector combine(double a, const TangentVector& g, double b, const TangentVector& h) {
  require_same_base(g, h);
  return TangentVector::trusted(g.base(), a * g.mat() + b * h.mat());
}

double inner(const TangentVector& g, const TangentVector& h) {
  require_same_base(g, h);
  return (g.mat().array() * h.mat().array()).sum();
}

// ---------------------------------------------------------------------------

SubspacePoint random_point(Index n, Index p, std::uint64_t seed) {
  if (p < 1 || n < 1 || p > n) {
    throw ShapeError("random_point needs 1 <= p <= n, got n = " + std::to_string(n) +
                     ", p = " + std::to_string(p));
  }
  return SubspacePoint::trusted(qf(gaussian(n, p, seed)));
}

TangentVector project_tangent(const SubspacePoint& x, const Eigen::Ref<const Matrix>& m) {
  if (m.rows() != x.n() || m.cols() != x.p()) {
    throw ShapeError("project_tangent: shape mismatch");
  }
  const Matrix& xr = x.rep();
  Matrix g = m - xr * (xr.transpose() * m);
  return TangentVector::trusted(x, std::move(g));
}

SubspacePoint exp_map(const TangentVector& g) {
  const Matrix& x = g.base().rep();
  CompactSvd s = g.svd();
  zero_small(s.sigma);
  if (s.sigma.size() == 0 || s.sigma.maxCoeff() == 0.0) return g.base();
  const Vector c = s.sigma.array().cos();
  const Vector sn = s.sigma.array().sin();
  Matrix y = (x * s.v) * c.asDiagonal() * s.v.transpose() + s.u * sn.asDiagonal() * s.v.transpose();
  return SubspacePoint::trusted(qf(y));
}

TangentVector log_map(const SubspacePoint& x, const SubspacePoint& y) {
  if (x.n() != y.n() || x.p() != y.p()) throw ShapeError("log_map: dimension mismatch");
  const Matrix& xr = x.rep();
  const Matrix& yr = y.rep();
  const Matrix xty = xr.transpose() * yr;
  const Vector sv = singular_values(xty);
  const double smin = sv.size() ? sv.minCoeff() : 0.0;
  if (!(smin > kInjectivityFloor)) {
    throw GeometryError("log_map: X^T Y is singular (sigma_min = " + std::to_string(smin) +
                        "); points are outside the injectivity domain");
  }
  const Matrix yperp = yr - xr * xty;
  // M = Yperp (X^T Y)^{-1}  <=>  (X^T Y)^T M^T = Yperp^T
  Matrix m = xty.transpose().partialPivLu().solve(yperp.transpose()).transpose();
  CompactSvd s = compact_svd(m);
  zero_small(s.sigma);
  s.sigma = s.sigma.array().atan();
  return TangentVector::with_svd(x, std::move(s));
}

SubspacePoint retract_qr(const TangentVector& g) {
  return SubspacePoint::trusted(qf(g.base().rep() + g.mat()));
}

Vector principal_angles(const SubspacePoint& x, const SubspacePoint& y) {
  if (x.n() != y.n() || x.p() != y.p()) throw ShapeError("principal_angles: dimension mismatch");
  const Index p = x.p();
  const Matrix& xr = x.rep();
  const Matrix& yr = y.rep();
  const Matrix ytx = yr.transpose() * xr;
  Vector cosines = singular_values(ytx);  // descending
  Vector theta(p);
  bool need_sines = false;
  for (Index i = 0; i < p; ++i) {
    const double c = std::clamp(cosines(i), 0.0, 1.0);
    theta(i) = std::acos(c);
    if (c > 1.0 - 1e-4) need_sines = true;
  }
  if (need_sines) {
    const Matrix yperp = yr - xr * (xr.transpose() * yr);
    Vector sines = singular_values(yperp);  // descending
    for (Index i = 0; i < p; ++i) {
      if (std::clamp(cosines(i), 0.0, 1.0) > 1.0 - 1e-4) {
        // i-th largest cosine pairs with the i-th smallest sine
        theta(i) = std::asin(std::clamp(sines(p - 1 - i), 0.0, 1.0));
      }
    }
  }
  std::sort(theta.data(), theta.data() + p);
  return theta;
}

double distance(const SubspacePoint& x, const SubspacePoint& y) {
  return principal_angles(x, y).norm();
}

TangentVector random_tangent(const SubspacePoint& x, double r, std::uint64_t seed) {
  if (x.p() == x.n()) return TangentVector::zero(x);  // Gr(n, n) is a single point
  Matrix m = gaussian(x.n(), x.p(), seed);
  TangentVector g = project_tangent(x, m);
  const double nrm = g.norm();
  if (nrm == 0.0) return TangentVector::zero(x);
  return g.scaled(r / nrm);
}

SubspacePoint perturb_within(const SubspacePoint& x, double r, std::uint64_t seed) {
  if (!(r >= 0.0 && r < std::numbers::pi / 2)) {
    throw DomainError("perturb_within: radius must lie in [0, pi/2)");
  }
  if (r == 0.0) return x;
  return exp_map(random_tangent(x, r, seed));
}

}  // namespace grasseig
