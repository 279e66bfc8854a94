#include "grasseig/problems.hpp"

#include <cmath>
#include <random>
#include <string>

#include "grasseig/errors.hpp"
#include "grasseig/linalg.hpp"
#include "grasseig/rayleigh.hpp"

namespace grasseig {

Vector planted_gap_eigenvalues(const PlantedGapSpec& s) {
  if (s.p < 1 || s.p >= s.n) throw DomainError("planted gap needs 1 <= p < n");
  if (!(s.delta > 0.0)) throw DomainError("planted gap needs delta > 0");
  if (!(s.rho >= 0.0 && s.rho < 1.0)) throw DomainError("planted gap needs 0 <= rho < 1");
  Vector lam(s.n);
  for (Index i = 0; i < s.p; ++i) {
    lam(i) = s.p == 1 ? 1.0 : 1.0 - s.rho * static_cast<double>(i) / static_cast<double>(s.p - 1);
  }
  const double lp1 = lam(s.p - 1) - s.delta;
  if (!(s.lambda_n >= 0.0) || !(lp1 > s.lambda_n || (s.n == s.p + 1 && lp1 >= s.lambda_n))) {
    throw DomainError("planted gap: lambda_{p+1} = " + std::to_string(lp1) +
                      " must exceed lambda_n = " + std::to_string(s.lambda_n));
  }
  const Index tail = s.n - s.p;
  for (Index j = 0; j < tail; ++j) {
    if (tail == 1) {
      lam(s.p) = lp1;
      break;
    }
    const double t = static_cast<double>(j) / static_cast<double>(tail - 1);
    lam(s.p + j) = s.lambda_n > 0.0 ? lp1 * std::pow(s.lambda_n / lp1, t) : lp1 * (1.0 - t);
  }
  return lam;
}

PlantedGapProblem make_planted_gap(const PlantedGapSpec& s) {
  const Vector lam = planted_gap_eigenvalues(s);
  std::mt19937_64 rng(s.seed);
  std::normal_distribution<double> normal;
  Matrix g(s.n, s.n);
  for (Index j = 0; j < s.n; ++j)
    for (Index i = 0; i < s.n; ++i) g(i, j) = normal(rng);
  Matrix q = qf(g);
  Matrix a = q * lam.asDiagonal() * q.transpose();
  a = 0.5 * (a + a.transpose()).eval();
  return {SymmetricOperator::dense(std::move(a)), DenseSpectrum{lam, std::move(q)}};
}

double planted_gap_delta_for_ratio(double ratio, double lambda_n) {
  // mu / gamma = 2 cQ delta / (2 (1 - lambda_n))
  return ratio * (1.0 - lambda_n) / kCQ;
}

}  // namespace grasseig
