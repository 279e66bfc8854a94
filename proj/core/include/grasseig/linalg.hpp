#pragma once

#include "grasseig/types.hpp"

namespace grasseig {

/// Thin QR factorization with R having a positive diagonal.
struct ThinQr {
  Matrix q;  // n x p, orthonormal columns
  Matrix r;  // p x p, upper triangular
};

/// Throws DegenerateError if some |R_ii| <= 1e-13 * max_j |R_jj|.
ThinQr thin_qr(const Eigen::Ref<const Matrix>& m);

/// Q factor of thin_qr(m).
Matrix qf(const Eigen::Ref<const Matrix>& m);

/// m * r^{-1} for upper-triangular r.
Matrix right_solve_upper(const Eigen::Ref<const Matrix>& m, const Eigen::Ref<const Matrix>& r);

/// Compact SVD of a tall matrix: g = u * diag(sigma) * v^T with u n x p,
/// sigma descending and v p x p orthogonal.
struct CompactSvd {
  Matrix u;
  Vector sigma;
  Matrix v;

  Matrix reconstruct() const;
};

CompactSvd compact_svd(const Eigen::Ref<const Matrix>& g);
Vector singular_values(const Eigen::Ref<const Matrix>& g);
double spectral_norm(const Eigen::Ref<const Matrix>& g);

/// Orthogonal polar factor of a square matrix.
Matrix polar_factor(const Eigen::Ref<const Matrix>& m);

/// ||X^T X - I||_F.
double orthonormality_defect(const Eigen::Ref<const Matrix>& x);

}  // namespace grasseig
