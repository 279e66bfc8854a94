#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "grasseig/properties.hpp"
#include "grasseig_bench/problem.hpp"

namespace grasseig::bench {

struct SolverSpec {
  SolverKind kind = SolverKind::Agd;
  AgdVariant variant = AgdVariant::Retraction;
  int cheb_degree = 10;

  /// File-name label: agd, agd-exp, sd, subspace, cheb-d10, rcg.
  std::string label() const;
};

AgdVariant parse_variant(const std::string& s);
std::string variant_name(AgdVariant v);

struct RunManifest {
  ProblemSpec problem;
  std::vector<SolverSpec> solvers;
  std::vector<std::uint64_t> seeds{0};
  std::filesystem::path out_dir = ".";
  std::optional<std::filesystem::path> params_file;
  std::optional<std::int64_t> max_iters;
  /// Suboptimality tolerance when a reference exists, else gradient norm.
  std::optional<double> tol;
  std::int64_t record_every = 1;
  bool timing = true;
  int jobs = 1;
};

/// Reads a JSON manifest; relative paths resolve against its directory.
RunManifest load_manifest(const std::filesystem::path& path);

struct RunRecord {
  std::string label;
  std::uint64_t seed = 0;
  std::filesystem::path file;
  std::string stop_reason;
  std::optional<std::string> failure;
  std::int64_t iterations = 0;
  std::uint64_t block_matvecs = 0;
  std::optional<double> final_subopt;
};

/// One trace file per (solver, seed), named <problem>_<label>_s<seed>.csv.
/// Every solver of a seed starts from the same random point.
std::vector<RunRecord> cmd_run(const RunManifest& manifest);

/// Parameter JSON for a problem: n, p, lambda1, lambdaP, lambdaP1, lambdaN,
/// delta, mu, gamma, gammaTilde, kappaR, source.  FD3D sources never touch
/// the dense oracle.
std::string cmd_params(const ProblemSpec& spec);

struct VerifyReport {
  std::string suite;
  std::vector<PropertyResult> results;
  bool pass = false;
  std::string json() const;
};

VerifyReport cmd_verify(const std::string& suite, std::uint64_t seed = 1);

}  // namespace grasseig::bench
