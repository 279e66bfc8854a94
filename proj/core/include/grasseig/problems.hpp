#pragma once

#include <cstdint>

#include "grasseig/matops.hpp"

namespace grasseig {

/// Synthetic problem with a prescribed spectrum: lambda_1..lambda_p linear in
/// [1 - rho, 1], lambda_{p+1} = lambda_p - delta, then a geometric tail down
/// to lambda_n, conjugated by a seeded random orthogonal matrix.
struct PlantedGapSpec {
  Index n = 200;
  Index p = 8;
  double delta = 0.01;
  double rho = 0.5;
  double lambda_n = 0.01;
  std::uint64_t seed = 0;
};

struct PlantedGapProblem {
  SymmetricOperator op;
  DenseSpectrum spectrum;  // exact by construction
};

/// Eigenvalues of the planted-gap spectrum, descending.
Vector planted_gap_eigenvalues(const PlantedGapSpec& spec);

/// Throws DomainError for p outside [1, n) or when the tail would not stay
/// below lambda_{p+1}.
PlantedGapProblem make_planted_gap(const PlantedGapSpec& spec);

/// delta giving mu / gamma = ratio for the planted spectrum (lambda_1 = 1).
double planted_gap_delta_for_ratio(double ratio, double lambda_n);

}  // namespace grasseig
