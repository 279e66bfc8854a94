#include "grasseig_bench/problem.hpp"

#include <algorithm>
#include <charconv>
#include <functional>
#include <sstream>

#include "grasseig/errors.hpp"

namespace grasseig::bench {

std::string objective_name(Objective o) { return o == Objective::Max ? "max" : "min"; }

Objective parse_objective(const std::string& s) {
  if (s == "max") return Objective::Max;
  if (s == "min") return Objective::Min;
  throw ConfigurationError("unknown objective '" + s + "' (expected max or min)");
}

std::string param_source_name(ParamSource s) {
  switch (s) {
    case ParamSource::Analytic: return "analytic";
    case ParamSource::Exact: return "exact";
    case ParamSource::Oracle: return "oracle";
    case ParamSource::File: return "file";
  }
  return "unknown";
}

ProblemSpec fd3d_problem(Fd3dSpec grid, Index p) {
  ProblemSpec s;
  s.source = ProblemSpec::Source::Fd3d;
  s.fd3d = grid;
  s.p = p;
  s.name = "fd3d-" + std::to_string(grid.nx) + "x" + std::to_string(grid.ny) + "x" +
           std::to_string(grid.nz);
  return s;
}

ProblemSpec matrix_problem(const std::filesystem::path& path, Index p) {
  ProblemSpec s;
  s.source = ProblemSpec::Source::MatrixMarket;
  s.matrix = path;
  s.p = p;
  s.name = path.stem().string();
  return s;
}

namespace {

ProblemSpec planted(const std::string& name, Index n, Index p, double delta, double rho) {
  ProblemSpec s;
  s.name = name;
  s.source = ProblemSpec::Source::PlantedGap;
  s.planted.n = n;
  s.planted.p = p;
  s.planted.delta = delta;
  s.planted.rho = rho;
  s.p = p;
  return s;
}

}  // namespace

std::vector<std::string> preset_names() {
  return {"fd3d-small", "fd3d-min", "clustered", "wide-gap", "planted-gap"};
}

ProblemSpec preset(const std::string& name) {
  if (name == "fd3d-small" || name == "fd3d-min") {
    ProblemSpec s = fd3d_problem({10, 12, 8}, 16);
    s.name = name;
    if (name == "fd3d-min") s.objective = Objective::Min;
    return s;
  }
  if (name == "clustered") return planted(name, 300, 8, 1e-3, 0.05);
  if (name == "wide-gap") return planted(name, 300, 8, 0.2, 0.3);
  if (name == "planted-gap") {
    return planted(name, 200, 8, planted_gap_delta_for_ratio(1e-2, PlantedGapSpec{}.lambda_n), 0.5);
  }
  std::string known;
  for (const auto& n : preset_names()) known += (known.empty() ? "" : ", ") + n;
  throw ConfigurationError("unknown preset '" + name + "' (expected " + known + ")");
}

Fd3dSpec parse_extents(const std::string& s) {
  Index v[3] = {0, 0, 0};
  std::size_t pos = 0;
  for (int i = 0; i < 3; ++i) {
    const std::size_t end = i < 2 ? s.find(',', pos) : s.size();
    if (end == std::string::npos) throw ConfigurationError("FD3D extents must be nx,ny,nz");
    const char* b = s.data() + pos;
    const char* e = s.data() + end;
    long long x = 0;
    auto [ptr, ec] = std::from_chars(b, e, x);
    if (ec != std::errc{} || ptr != e || x < 1) {
      throw ConfigurationError("FD3D extents must be three positive integers, got '" + s + "'");
    }
    v[i] = static_cast<Index>(x);
    pos = end + 1;
  }
  return {v[0], v[1], v[2]};
}

DenseSpectrum transform_spectrum(const DenseSpectrum& s, double scale, double alpha) {
  DenseSpectrum out;
  const Index n = s.eigenvalues.size();
  out.eigenvalues = (scale * s.eigenvalues.array() + alpha).matrix();
  out.eigenvectors = s.eigenvectors;
  if (scale < 0.0) {
    out.eigenvalues.reverseInPlace();
    if (out.eigenvectors.cols() == n) out.eigenvectors.rowwise().reverseInPlace();
  }
  return out;
}

Problem prepare(const ProblemSpec& spec, const std::optional<std::filesystem::path>& params_file,
                bool with_reference) {
  if (spec.p < 1) throw ConfigurationError("p must be >= 1");

  std::optional<SymmetricOperator> base;
  std::optional<DenseSpectrum> exact;
  std::optional<std::vector<double>> analytic;
  switch (spec.source) {
    case ProblemSpec::Source::MatrixMarket:
      base = load_matrix_market(spec.matrix);
      break;
    case ProblemSpec::Source::Fd3d:
      base = build_fd3d(spec.fd3d);
      analytic = analytic_fd3d_eigenvalues(spec.fd3d);
      break;
    case ProblemSpec::Source::PlantedGap: {
      PlantedGapSpec ps = spec.planted;
      ps.p = spec.p;
      PlantedGapProblem pg = make_planted_gap(ps);
      base = std::move(pg.op);
      exact = std::move(pg.spectrum);
      break;
    }
  }
  const Index n = base->size();
  if (spec.p >= n) {
    throw DomainError("p = " + std::to_string(spec.p) + " must be smaller than n = " +
                      std::to_string(n));
  }

  // op = scale A + offset I
  double scale = 1.0;
  double offset = spec.shift.value_or(0.0);
  SymmetricOperator op = base->shifted(offset);
  if (spec.objective == Objective::Min) {
    // smallest eigenpairs of A are the largest of c I - A with c >= lambda_max
    const double c = op.norm_bound();
    op = op.affine(-1.0, c);
    scale = -1.0;
    offset = c - offset;
  }

  Problem pr{spec.name, op, spec.p, {}, ParamSource::Oracle, std::nullopt, std::nullopt, scale,
             offset};
  const bool within_cap = n <= default_oracle_cap();

  if (exact) {
    pr.spectrum = transform_spectrum(*exact, scale, offset);
  } else if (within_cap && with_reference) {
    pr.spectrum = dense_eig_oracle(op);
  }

  if (params_file) {
    pr.params = derive_params(read_parameter_file(*params_file));
    pr.param_source = ParamSource::File;
  } else if (analytic) {
    std::vector<double> lam(analytic->size());
    std::transform(analytic->begin(), analytic->end(), lam.begin(),
                   [&](double l) { return scale * l + offset; });
    std::sort(lam.begin(), lam.end(), std::greater<>());
    pr.params = derive_params(lam, spec.p);
    pr.param_source = ParamSource::Analytic;
  } else if (pr.spectrum) {
    pr.params = derive_params(*pr.spectrum, spec.p);
    pr.param_source = exact ? ParamSource::Exact : ParamSource::Oracle;
  } else if (within_cap) {
    const Vector lam = dense_eigenvalues(op);
    pr.params = derive_params(std::span<const double>(lam.data(), lam.size()), spec.p);
    pr.param_source = ParamSource::Oracle;
  } else {
    throw SizeError("n = " + std::to_string(n) + " exceeds the dense oracle cap (" +
                    std::to_string(default_oracle_cap()) +
                    "); supply a parameter file or raise GRASSEIG_ORACLE_CAP");
  }

  if (pr.spectrum && with_reference) pr.reference = make_reference(*pr.spectrum, spec.p);
  return pr;
}

}  // namespace grasseig::bench
