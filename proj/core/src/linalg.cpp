#include "grasseig/linalg.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/QR>
#include <Eigen/SVD>

#include "grasseig/errors.hpp"

namespace grasseig {

namespace {
constexpr double kRankTol = 1e-13;
}

ThinQr thin_qr(const Eigen::Ref<const Matrix>& m) {
  const Index n = m.rows();
  const Index p = m.cols();
  if (p > n) throw ShapeError("thin_qr: more columns than rows");
  Eigen::HouseholderQR<Matrix> qr(m);
  ThinQr out;
  out.q = qr.householderQ() * Matrix::Identity(n, p);
  out.r = qr.matrixQR().topRows(p).triangularView<Eigen::Upper>();

  double rmax = 0.0;
  for (Index i = 0; i < p; ++i) rmax = std::max(rmax, std::abs(out.r(i, i)));
  for (Index i = 0; i < p; ++i) {
    if (!(std::abs(out.r(i, i)) > kRankTol * rmax)) {
      throw DegenerateError("thin_qr: numerically rank-deficient block");
    }
    if (out.r(i, i) < 0.0) {
      out.r.row(i) *= -1.0;
      out.q.col(i) *= -1.0;
    }
  }
  return out;
}

Matrix qf(const Eigen::Ref<const Matrix>& m) { return thin_qr(m).q; }

Matrix right_solve_upper(const Eigen::Ref<const Matrix>& m, const Eigen::Ref<const Matrix>& r) {
  // m r^{-1} = (r^{-T} m^T)^T
  Matrix mt = m.transpose();
  r.transpose().triangularView<Eigen::Lower>().solveInPlace(mt);
  return mt.transpose();
}

Matrix CompactSvd::reconstruct() const { return u * sigma.asDiagonal() * v.transpose(); }

CompactSvd compact_svd(const Eigen::Ref<const Matrix>& g) {
  const Index n = g.rows();
  const Index p = g.cols();
  if (p > n) throw ShapeError("compact_svd: more columns than rows");
  // G = Q R, R = Ur S V^T  =>  G = (Q Ur) S V^T
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(n, p);
  Matrix r = qr.matrixQR().topRows(p).triangularView<Eigen::Upper>();
  Eigen::JacobiSVD<Matrix> svd(r, Eigen::ComputeFullU | Eigen::ComputeFullV);
  CompactSvd out;
  out.u = q * svd.matrixU();
  out.sigma = svd.singularValues();
  out.v = svd.matrixV();
  return out;
}

Vector singular_values(const Eigen::Ref<const Matrix>& g) {
  if (g.rows() > 2 * g.cols()) {
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix r = qr.matrixQR().topRows(g.cols()).triangularView<Eigen::Upper>();
    return Eigen::JacobiSVD<Matrix>(r).singularValues();
  }
  return Eigen::JacobiSVD<Matrix>(g).singularValues();
}

double spectral_norm(const Eigen::Ref<const Matrix>& g) {
  if (g.size() == 0) return 0.0;
  return singular_values(g)(0);
}

Matrix polar_factor(const Eigen::Ref<const Matrix>& m) {
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().transpose();
}

double orthonormality_defect(const Eigen::Ref<const Matrix>& x) {
  return (x.transpose() * x - Matrix::Identity(x.cols(), x.cols())).norm();
}

}  // namespace grasseig
