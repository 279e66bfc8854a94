#pragma once

#include <cstdint>
#include <memory>
#include <optional>

#include "grasseig/linalg.hpp"
#include "grasseig/types.hpp"

namespace grasseig {

/// Point of Gr(n, p) stored as an n x p representative with orthonormal
/// columns.  Cheap to copy: the representative is shared.
class SubspacePoint {
 public:
  /// Throws ShapeError unless 1 <= p <= n and DomainError if ||X^T X - I||_F
  /// exceeds 1e-10.
  explicit SubspacePoint(Matrix rep);

  /// Skips the orthonormality check; used for outputs of QR factorizations.
  static SubspacePoint trusted(Matrix rep);

  const Matrix& rep() const noexcept { return *rep_; }
  Index n() const noexcept { return rep_->rows(); }
  Index p() const noexcept { return rep_->cols(); }

 private:
  struct Trusted {};
  SubspacePoint(Matrix rep, Trusted);
  std::shared_ptr<const Matrix> rep_;
};

/// Tangent vector G at a representative X (X^T G = 0), optionally carrying
/// its compact SVD.
class TangentVector {
 public:
  /// Throws ShapeError on mismatch and DomainError if ||X^T G||_F exceeds
  /// 1e-10 * max(1, ||G||_F).
  TangentVector(SubspacePoint base, Matrix g);

  static TangentVector trusted(SubspacePoint base, Matrix g);
  /// G = svd.u * diag(svd.sigma) * svd.v^T.
  static TangentVector with_svd(SubspacePoint base, CompactSvd svd);
  static TangentVector zero(const SubspacePoint& base);

  const SubspacePoint& base() const noexcept { return base_; }
  const Matrix& mat() const noexcept { return g_; }
  bool has_svd() const noexcept { return svd_ != nullptr; }
  /// Cached factors, or a freshly computed SVD when none is cached.
  CompactSvd svd() const;

  double norm() const { return g_.norm(); }
  double spectral_norm() const;

  TangentVector scaled(double s) const;

 private:
  TangentVector(SubspacePoint base, Matrix g, std::shared_ptr<const CompactSvd> svd);

  SubspacePoint base_;
  Matrix g_;
  std::shared_ptr<const CompactSvd> svd_;
};

/// a * g + b * h for tangent vectors at the same base.
TangentVector combine(double a, const TangentVector& g, double b, const TangentVector& h);

/// Frobenius inner product of two tangent vectors at the same base.
double inner(const TangentVector& g, const TangentVector& h);

/// Singular values below this fraction of the largest are treated as zero
/// in exp_map and log_map.
inline constexpr double kRotationCutoff = 1e-14;
/// log_map requires sigma_min(X^T Y) above this value.
inline constexpr double kInjectivityFloor = 1e-10;

SubspacePoint random_point(Index n, Index p, std::uint64_t seed);

/// (I - X X^T) M.
TangentVector project_tangent(const SubspacePoint& x, const Eigen::Ref<const Matrix>& m);

/// Exp_X(G) = X V cos(S) V^T + U sin(S) V^T, re-orthonormalized by QR.
SubspacePoint exp_map(const TangentVector& g);

/// Log_X(Y) = U atan(S) V^T from the SVD of (I - X X^T) Y (X^T Y)^{-1}.  The
/// result carries its SVD.  Throws GeometryError when X^T Y is numerically
/// singular.
TangentVector log_map(const SubspacePoint& x, const SubspacePoint& y);

/// qf(X + G).  Throws DegenerateError when X + G loses rank.
SubspacePoint retract_qr(const TangentVector& g);

/// Principal angles between span(X) and span(Y), ascending in [0, pi/2].
Vector principal_angles(const SubspacePoint& x, const SubspacePoint& y);

double distance(const SubspacePoint& x, const SubspacePoint& y);

/// Exp_X(G) with G a random tangent direction of Frobenius norm r.
SubspacePoint perturb_within(const SubspacePoint& x, double r, std::uint64_t seed);

/// Random tangent vector at X with Frobenius norm r.
TangentVector random_tangent(const SubspacePoint& x, double r, std::uint64_t seed);

}  // namespace grasseig
