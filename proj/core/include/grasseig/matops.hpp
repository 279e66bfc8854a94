#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include <Eigen/SparseCore>

#include "grasseig/types.hpp"

namespace grasseig {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor, int>;

/// Symmetric linear operator acting on n x p blocks.
///
/// The matrix data is immutable and shared between copies; every copy owns
/// its own block-product counter.  A product with an n x p block counts as one
/// unit regardless of p.  The operator represents scale * B + shift * I, where
/// B is the stored dense or sparse matrix, so spectral shifts and negation
/// cost nothing extra per product.
class SymmetricOperator {
 public:
  /// Wraps a dense symmetric matrix. Throws SymmetryError if A != A^T
  /// beyond 1e-12 relative.
  static SymmetricOperator dense(Matrix a);
  /// Wraps a sparse symmetric matrix (explicit zeros are pruned).
  static SymmetricOperator sparse(SparseMatrix a);
  static SymmetricOperator identity(Index n);
  static SymmetricOperator diagonal(const Vector& d);

  Index size() const noexcept { return n_; }
  bool is_sparse() const noexcept;
  /// Number of stored nonzeros of the base matrix (n^2 for dense).
  std::int64_t nonzeros() const noexcept;

  double scale() const noexcept { return scale_; }
  double shift() const noexcept { return shift_; }

  /// Returns (scale * B + shift * I) * m and increments the counter by one.
  Matrix apply_block(const Eigen::Ref<const Matrix>& m) const;

  std::uint64_t block_products() const noexcept { return counter_; }
  void reset_counter() noexcept { counter_ = 0; }
  /// Copy sharing the matrix data with a counter starting at zero.
  SymmetricOperator fresh() const;

  /// A + alpha I.
  SymmetricOperator shifted(double alpha) const;
  /// s A + alpha I.
  SymmetricOperator affine(double s, double alpha) const;

  /// Dense copy of the represented matrix (not counted).
  Matrix to_dense() const;
  /// Cheap upper bound on the spectral radius (Gershgorin row sums).
  double norm_bound() const;

 private:
  struct Storage;
  SymmetricOperator(std::shared_ptr<const Storage> storage, double scale, double shift);

  std::shared_ptr<const Storage> storage_;
  Index n_ = 0;
  double scale_ = 1.0;
  double shift_ = 0.0;
  mutable std::uint64_t counter_ = 0;
};

/// A + alpha I with its own counter.
SymmetricOperator shift(const SymmetricOperator& a, double alpha);

/// Largest |<Au, v> - <u, Av>| / (bound * |u| |v|) over random probes.
double symmetry_defect(const SymmetricOperator& a, int probes, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Matrix Market

/// Reads a `%%MatrixMarket matrix <coordinate|array> <real|integer|pattern>
/// <symmetric|general>` file.  Symmetric storage is mirrored, explicit zeros
/// dropped, general matrices are checked for symmetry.
SymmetricOperator load_matrix_market(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// 3D finite-difference Laplacian

struct Fd3dSpec {
  Index nx = 1;
  Index ny = 1;
  Index nz = 1;

  Index size() const;  // throws SizeError on overflow or extent < 1
};

/// 7-point Dirichlet stencil on a unit grid: 6 on the diagonal, -1 between
/// neighbours.  Node (i, j, k) maps to row i + nx * (j + ny * k).
SymmetricOperator build_fd3d(const Fd3dSpec& spec);

/// Closed-form spectrum of build_fd3d(spec), sorted descending.
std::vector<double> analytic_fd3d_eigenvalues(const Fd3dSpec& spec);

// ---------------------------------------------------------------------------
// Dense oracle

struct DenseSpectrum {
  Vector eigenvalues;   // descending
  Matrix eigenvectors;  // column i pairs with eigenvalues[i]
};

/// Default n cap for dense_eig_oracle; GRASSEIG_ORACLE_CAP overrides 5000.
Index default_oracle_cap();

/// Full symmetric eigendecomposition, eigenvalues descending.  Each
/// eigenvector is signed so that its largest-magnitude entry is positive.
DenseSpectrum dense_eig_oracle(const SymmetricOperator& a,
                               std::optional<Index> cap = std::nullopt);

/// Eigenvalues only, descending.
Vector dense_eigenvalues(const SymmetricOperator& a, std::optional<Index> cap = std::nullopt);

// ---------------------------------------------------------------------------
// Parameter file: {"lambda1": .., "lambdaP": .., "lambdaP1": .., "lambdaN": ..}

struct EigenvalueSummary {
  double lambda1 = 0.0;
  double lambdaP = 0.0;
  double lambdaP1 = 0.0;
  double lambdaN = 0.0;
};

EigenvalueSummary read_parameter_file(const std::filesystem::path& path);

/// Extracts (lambda_1, lambda_p, lambda_{p+1}, lambda_n) from a descending list.
EigenvalueSummary summarize_eigenvalues(std::span<const double> descending, Index p);

}  // namespace grasseig
