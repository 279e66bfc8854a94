#pragma once

// Independent reference computations used only by the tests.  Nothing here
// calls into the library under test.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline Matrix gaussian(Eigen::Index n, Eigen::Index p, std::uint64_t seed) {
  std::mt19937_64 rng(seed ^ 0x5eedULL);
  std::normal_distribution<double> nd;
  Matrix m(n, p);
  for (Eigen::Index j = 0; j < p; ++j)
    for (Eigen::Index i = 0; i < n; ++i) m(i, j) = nd(rng);
  return m;
}

inline Matrix orthonormalize(const Matrix& m) {
  Eigen::HouseholderQR<Matrix> qr(m);
  return qr.householderQ() * Matrix::Identity(m.rows(), m.cols());
}

inline Matrix random_symmetric(Eigen::Index n, std::uint64_t seed) {
  const Matrix g = gaussian(n, n, seed);
  return 0.5 * (g + g.transpose());
}

/// Orthonormal basis of a random subspace, n x p.
inline Matrix random_basis(Eigen::Index n, Eigen::Index p, std::uint64_t seed) {
  return orthonormalize(gaussian(n, p, seed));
}

/// -Tr(X^T A X) computed densely.
inline double rayleigh(const Matrix& a, const Matrix& x) { return -(x.transpose() * a * x).trace(); }

/// Principal angles from the SVD of X^T Y, ascending (fine away from 0).
inline Vector angles(const Matrix& x, const Matrix& y) {
  Eigen::JacobiSVD<Matrix> svd(x.transpose() * y);
  Vector c = svd.singularValues();
  Vector t(c.size());
  for (Eigen::Index i = 0; i < c.size(); ++i) t(i) = std::acos(std::clamp(c(i), -1.0, 1.0));
  std::sort(t.data(), t.data() + t.size());
  return t;
}

/// Grassmann logarithm U atan(S) V^T from the SVD of (I - X X^T) Y (X^T Y)^{-1}.
inline Matrix log_map(const Matrix& x, const Matrix& y) {
  const Matrix xty = x.transpose() * y;
  const Matrix m = (y - x * xty) * xty.inverse();
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  Vector t = svd.singularValues();
  for (Eigen::Index i = 0; i < t.size(); ++i) t(i) = std::atan(t(i));
  return svd.matrixU() * t.asDiagonal() * svd.matrixV().transpose();
}

/// Grassmann exponential X V cos(S) V^T + U sin(S) V^T, orthonormalized.
inline Matrix exp_map(const Matrix& x, const Matrix& g) {
  Eigen::JacobiSVD<Matrix> svd(g, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector s = svd.singularValues();
  const Matrix v = svd.matrixV();
  const Matrix y = x * v * s.array().cos().matrix().asDiagonal() * v.transpose() +
                   svd.matrixU() * s.array().sin().matrix().asDiagonal() * v.transpose();
  return orthonormalize(y);
}

/// Geodesic distance from principal angles; atan2 of sines and cosines keeps
/// small angles accurate.
inline double distance(const Matrix& x, const Matrix& y) {
  const Matrix r = y - x * (x.transpose() * y);
  Eigen::JacobiSVD<Matrix> svd(r);
  Eigen::JacobiSVD<Matrix> csvd(x.transpose() * y);
  double d2 = 0.0;
  const Vector s = svd.singularValues();
  const Vector c = csvd.singularValues();
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    // pair the i-th largest sine with the i-th smallest cosine
    const double t = std::atan2(s(i), c(c.size() - 1 - i));
    d2 += t * t;
  }
  return std::sqrt(d2);
}

/// Argmin of g over an evenly spaced grid with `points` samples on [lo, hi].
inline double grid_argmin(const std::function<double(double)>& g, double lo, double hi, int points) {
  double best = lo;
  double gb = g(lo);
  for (int i = 1; i < points; ++i) {
    const double t = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
    const double v = g(t);
    if (v < gb) {
      gb = v;
      best = t;
    }
  }
  return best;
}

/// Root of f on [lo, hi] by bisection, assuming a sign change.
inline double bisect(const std::function<double(double)>& f, double lo, double hi) {
  double flo = f(lo);
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double fm = f(mid);
    if ((fm > 0) == (flo > 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

inline double central_difference(const std::function<double(double)>& f, double t, double h) {
  return (f(t + h) - f(t - h)) / (2.0 * h);
}

inline double second_difference(const std::function<double(double)>& f, double t, double h) {
  return (f(t + h) - 2.0 * f(t) + f(t - h)) / (h * h);
}

/// T_d(x) for real x by the trigonometric / hyperbolic closed forms.
inline double chebyshev_t(int d, double x) {
  if (std::abs(x) <= 1.0) return std::cos(d * std::acos(x));
  const double v = std::cosh(d * std::acosh(std::abs(x)));
  return (x < 0 && d % 2 == 1) ? -v : v;
}

/// Dirichlet 7-point Laplacian assembled densely, row i + nx (j + ny k).
inline Matrix fd3d_dense(int nx, int ny, int nz) {
  const int n = nx * ny * nz;
  Matrix a = Matrix::Zero(n, n);
  auto id = [&](int i, int j, int k) { return i + nx * (j + ny * k); };
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) {
        const int r = id(i, j, k);
        a(r, r) = 6.0;
        if (i + 1 < nx) a(r, id(i + 1, j, k)) = a(id(i + 1, j, k), r) = -1.0;
        if (j + 1 < ny) a(r, id(i, j + 1, k)) = a(id(i, j + 1, k), r) = -1.0;
        if (k + 1 < nz) a(r, id(i, j, k + 1)) = a(id(i, j, k + 1), r) = -1.0;
      }
  return a;
}

/// Eigenvalues of a dense symmetric matrix, descending.
inline Vector eigenvalues_desc(const Matrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(a, Eigen::EigenvaluesOnly);
  return es.eigenvalues().reverse();
}

/// Unique path under the temp directory for scratch files.
inline std::filesystem::path temp_path(const std::string& stem) {
  static int counter = 0;
  std::random_device rd;
  return std::filesystem::temp_directory_path() /
         ("grasseig_" + stem + "_" + std::to_string(rd()) + "_" + std::to_string(counter++));
}

inline std::filesystem::path write_text(const std::string& stem, const std::string& text) {
  const auto p = temp_path(stem);
  std::ofstream(p, std::ios::binary) << text;
  return p;
}

}  // namespace oracle
