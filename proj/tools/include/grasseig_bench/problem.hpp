#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "grasseig/matops.hpp"
#include "grasseig/problems.hpp"
#include "grasseig/rayleigh.hpp"
#include "grasseig/solvers.hpp"

namespace grasseig::bench {

enum class Objective { Max, Min };

std::string objective_name(Objective o);
Objective parse_objective(const std::string& s);

struct ProblemSpec {
  enum class Source { MatrixMarket, Fd3d, PlantedGap };

  std::string name;  // used in trace file names
  Source source = Source::Fd3d;
  std::filesystem::path matrix;
  Fd3dSpec fd3d;
  PlantedGapSpec planted;
  Index p = 1;
  Objective objective = Objective::Max;
  std::optional<double> shift;
};

/// Named desk-scale problems: fd3d-small, fd3d-min, clustered, wide-gap,
/// planted-gap.  Throws ConfigurationError for an unknown name.
ProblemSpec preset(const std::string& name);
std::vector<std::string> preset_names();

ProblemSpec fd3d_problem(Fd3dSpec grid, Index p);
ProblemSpec matrix_problem(const std::filesystem::path& path, Index p);

/// Parses "nx,ny,nz".
Fd3dSpec parse_extents(const std::string& s);

/// Where the spectral parameters came from.
enum class ParamSource { Analytic, Exact, Oracle, File };
std::string param_source_name(ParamSource s);

struct Problem {
  std::string name;
  SymmetricOperator op;
  Index p = 1;
  SpectralParams params;
  ParamSource param_source = ParamSource::Oracle;
  /// Full spectrum when n is within the oracle cap (or known exactly).
  std::optional<DenseSpectrum> spectrum;
  /// Dominant subspace for suboptimality and distance; empty above the cap.
  std::optional<Reference> reference;
  /// s and alpha with op = s A + alpha I relative to the source matrix A.
  double scale = 1.0;
  double offset = 0.0;
};

/// Builds the operator and its parameters.  Parameters come from the
/// parameter file when given, else the analytic formula (FD3D), the planted
/// spectrum, or the dense oracle.  Throws SizeError when the oracle cap is
/// exceeded and no parameter file is available.  Without `with_reference`
/// only eigenvalues are computed (no eigenvectors, no oracle for FD3D).
Problem prepare(const ProblemSpec& spec,
                const std::optional<std::filesystem::path>& params_file = std::nullopt,
                bool with_reference = true);

/// Spectrum of s A + alpha I given that of A.
DenseSpectrum transform_spectrum(const DenseSpectrum& s, double scale, double alpha);

}  // namespace grasseig::bench
