#include "grasseig/matops.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <numbers>
#include <random>
#include <string>

#include <Eigen/Eigenvalues>
#include <nlohmann/json.hpp>

#include "grasseig/errors.hpp"

namespace grasseig {

struct SymmetricOperator::Storage {
  std::variant<Matrix, SparseMatrix> data;
};

namespace {

constexpr double kSymmetryTol = 1e-12;

double max_abs(const Matrix& a) { return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff(); }

}  // namespace

SymmetricOperator::SymmetricOperator(std::shared_ptr<const Storage> storage, double scale,
                                     double shift)
    : storage_(std::move(storage)), scale_(scale), shift_(shift) {
  n_ = std::visit([](const auto& m) -> Index { return m.rows(); }, storage_->data);
}

SymmetricOperator SymmetricOperator::dense(Matrix a) {
  if (a.rows() != a.cols()) throw ShapeError("dense operator must be square");
  const double scale = std::max(1.0, max_abs(a));
  if (max_abs(a - a.transpose()) > kSymmetryTol * scale) {
    throw SymmetryError("dense operator is not symmetric");
  }
  Matrix sym = 0.5 * (a + a.transpose());
  return SymmetricOperator(std::make_shared<Storage>(Storage{std::move(sym)}), 1.0, 0.0);
}

SymmetricOperator SymmetricOperator::sparse(SparseMatrix a) {
  if (a.rows() != a.cols()) throw ShapeError("sparse operator must be square");
  a.prune(0.0);
  a.makeCompressed();
  SparseMatrix at = a.transpose();
  double amax = 0.0;
  for (Index k = 0; k < a.nonZeros(); ++k) amax = std::max(amax, std::abs(a.valuePtr()[k]));
  SparseMatrix diff = a - at;
  double dmax = 0.0;
  for (Index k = 0; k < diff.nonZeros(); ++k) dmax = std::max(dmax, std::abs(diff.valuePtr()[k]));
  if (dmax > kSymmetryTol * std::max(1.0, amax)) {
    throw SymmetryError("sparse operator is not symmetric");
  }
  return SymmetricOperator(std::make_shared<Storage>(Storage{std::move(a)}), 1.0, 0.0);
}

SymmetricOperator SymmetricOperator::identity(Index n) {
  SparseMatrix eye(n, n);
  eye.setIdentity();
  return sparse(std::move(eye));
}

SymmetricOperator SymmetricOperator::diagonal(const Vector& d) {
  const Index n = d.size();
  SparseMatrix m(n, n);
  std::vector<Eigen::Triplet<double, int>> t;
  t.reserve(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) t.emplace_back(static_cast<int>(i), static_cast<int>(i), d(i));
  m.setFromTriplets(t.begin(), t.end());
  return sparse(std::move(m));
}

bool SymmetricOperator::is_sparse() const noexcept {
  return std::holds_alternative<SparseMatrix>(storage_->data);
}

std::int64_t SymmetricOperator::nonzeros() const noexcept {
  if (const auto* s = std::get_if<SparseMatrix>(&storage_->data)) return s->nonZeros();
  return static_cast<std::int64_t>(n_) * static_cast<std::int64_t>(n_);
}

Matrix SymmetricOperator::apply_block(const Eigen::Ref<const Matrix>& m) const {
  if (m.rows() != n_ || m.cols() < 1) {
    throw ShapeError("apply_block: expected " + std::to_string(n_) + " x p block, got " +
                     std::to_string(m.rows()) + " x " + std::to_string(m.cols()));
  }
  ++counter_;
  Matrix out = std::visit([&](const auto& b) -> Matrix { return b * m; }, storage_->data);
  if (scale_ != 1.0) out *= scale_;
  if (shift_ != 0.0) out += shift_ * m;
  return out;
}

SymmetricOperator SymmetricOperator::fresh() const {
  return SymmetricOperator(storage_, scale_, shift_);
}

SymmetricOperator SymmetricOperator::shifted(double alpha) const { return affine(1.0, alpha); }

SymmetricOperator SymmetricOperator::affine(double s, double alpha) const {
  return SymmetricOperator(storage_, s * scale_, s * shift_ + alpha);
}

Matrix SymmetricOperator::to_dense() const {
  Matrix out = std::visit([](const auto& b) -> Matrix { return Matrix(b); }, storage_->data);
  out *= scale_;
  out.diagonal().array() += shift_;
  return out;
}

double SymmetricOperator::norm_bound() const {
  double base = 0.0;
  if (const auto* s = std::get_if<SparseMatrix>(&storage_->data)) {
    for (Index i = 0; i < s->outerSize(); ++i) {
      double row = 0.0;
      for (SparseMatrix::InnerIterator it(*s, i); it; ++it) row += std::abs(it.value());
      base = std::max(base, row);
    }
  } else {
    base = std::get<Matrix>(storage_->data).cwiseAbs().rowwise().sum().maxCoeff();
  }
  return std::abs(scale_) * base + std::abs(shift_);
}

SymmetricOperator shift(const SymmetricOperator& a, double alpha) { return a.shifted(alpha); }

double symmetry_defect(const SymmetricOperator& a, int probes, std::uint64_t seed) {
  SymmetricOperator op = a.fresh();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  const double bound = std::max(op.norm_bound(), std::numeric_limits<double>::min());
  double worst = 0.0;
  for (int k = 0; k < probes; ++k) {
    Matrix uv(op.size(), 2);
    for (Index i = 0; i < uv.size(); ++i) uv.data()[i] = normal(rng);
    Matrix a_uv = op.apply_block(uv);
    const double lhs = a_uv.col(0).dot(uv.col(1));
    const double rhs = uv.col(0).dot(a_uv.col(1));
    const double denom = bound * uv.col(0).norm() * uv.col(1).norm();
    worst = std::max(worst, std::abs(lhs - rhs) / denom);
  }
  return worst;
}

// ---------------------------------------------------------------------------

Index Fd3dSpec::size() const {
  if (nx < 1 || ny < 1 || nz < 1) throw SizeError("fd3d extents must be >= 1");
  constexpr auto kMax = static_cast<Index>(std::numeric_limits<int>::max() / 7);
  if (nx > kMax || ny > kMax / nx || nz > kMax / (nx * ny)) {
    throw SizeError("fd3d grid overflows the index space");
  }
  return nx * ny * nz;
}

SymmetricOperator build_fd3d(const Fd3dSpec& spec) {
  const Index n = spec.size();
  std::vector<Eigen::Triplet<double, int>> t;
  t.reserve(static_cast<std::size_t>(7 * n));
  auto id = [&](Index i, Index j, Index k) {
    return static_cast<int>(i + spec.nx * (j + spec.ny * k));
  };
  for (Index k = 0; k < spec.nz; ++k) {
    for (Index j = 0; j < spec.ny; ++j) {
      for (Index i = 0; i < spec.nx; ++i) {
        const int row = id(i, j, k);
        t.emplace_back(row, row, 6.0);
        if (i > 0) t.emplace_back(row, id(i - 1, j, k), -1.0);
        if (i + 1 < spec.nx) t.emplace_back(row, id(i + 1, j, k), -1.0);
        if (j > 0) t.emplace_back(row, id(i, j - 1, k), -1.0);
        if (j + 1 < spec.ny) t.emplace_back(row, id(i, j + 1, k), -1.0);
        if (k > 0) t.emplace_back(row, id(i, j, k - 1), -1.0);
        if (k + 1 < spec.nz) t.emplace_back(row, id(i, j, k + 1), -1.0);
      }
    }
  }
  SparseMatrix m(n, n);
  m.setFromTriplets(t.begin(), t.end());
  return SymmetricOperator::sparse(std::move(m));
}

std::vector<double> analytic_fd3d_eigenvalues(const Fd3dSpec& spec) {
  const Index n = spec.size();
  auto axis = [](Index m) {
    std::vector<double> v(static_cast<std::size_t>(m));
    for (Index i = 1; i <= m; ++i) {
      const double s = std::sin(static_cast<double>(i) * std::numbers::pi / (2.0 * static_cast<double>(m + 1)));
      v[static_cast<std::size_t>(i - 1)] = 4.0 * s * s;
    }
    return v;
  };
  const auto ex = axis(spec.nx);
  const auto ey = axis(spec.ny);
  const auto ez = axis(spec.nz);
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(n));
  for (double a : ex)
    for (double b : ey)
      for (double c : ez) out.push_back(a + b + c);
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

// ---------------------------------------------------------------------------

Index default_oracle_cap() {
  if (const char* env = std::getenv("GRASSEIG_ORACLE_CAP")) {
    char* end = nullptr;
    const long long v = std::strtoll(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<Index>(v);
  }
  return 5000;
}

namespace {

void check_cap(const SymmetricOperator& a, std::optional<Index> cap) {
  const Index limit = cap.value_or(default_oracle_cap());
  if (a.size() > limit) {
    throw SizeError("dense oracle: n = " + std::to_string(a.size()) + " exceeds cap " +
                    std::to_string(limit) + "; supply a parameter file");
  }
}

}  // namespace

DenseSpectrum dense_eig_oracle(const SymmetricOperator& a, std::optional<Index> cap) {
  check_cap(a, cap);
  Eigen::SelfAdjointEigenSolver<Matrix> es(a.to_dense());
  if (es.info() != Eigen::Success) throw Error("dense oracle: eigensolver failed");
  const Index n = a.size();
  DenseSpectrum out;
  out.eigenvalues = es.eigenvalues().reverse();
  out.eigenvectors = es.eigenvectors().rowwise().reverse();
  for (Index j = 0; j < n; ++j) {
    Index imax = 0;
    out.eigenvectors.col(j).cwiseAbs().maxCoeff(&imax);
    if (out.eigenvectors(imax, j) < 0.0) out.eigenvectors.col(j) *= -1.0;
  }
  return out;
}

Vector dense_eigenvalues(const SymmetricOperator& a, std::optional<Index> cap) {
  check_cap(a, cap);
  Eigen::SelfAdjointEigenSolver<Matrix> es(a.to_dense(), Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw Error("dense oracle: eigensolver failed");
  return es.eigenvalues().reverse();
}

EigenvalueSummary summarize_eigenvalues(std::span<const double> descending, Index p) {
  const auto n = static_cast<Index>(descending.size());
  if (p < 1 || p >= n) {
    throw DomainError("subspace dimension p = " + std::to_string(p) + " must satisfy 1 <= p < n = " +
                      std::to_string(n));
  }
  if (!std::is_sorted(descending.begin(), descending.end(), std::greater<>())) {
    throw DomainError("eigenvalues must be sorted descending");
  }
  const auto up = static_cast<std::size_t>(p);
  return {descending.front(), descending[up - 1], descending[up], descending.back()};
}

EigenvalueSummary read_parameter_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open parameter file " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("parameter file " + path.string() + ": " + e.what());
  }
  auto get = [&](const char* key) {
    if (!j.contains(key) || !j[key].is_number()) {
      throw FormatError(std::string("parameter file is missing numeric key '") + key + "'");
    }
    return j[key].get<double>();
  };
  return {get("lambda1"), get("lambdaP"), get("lambdaP1"), get("lambdaN")};
}

}  // namespace grasseig
