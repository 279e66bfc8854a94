#include <cstdio>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "grasseig/errors.hpp"
#include "grasseig_bench/commands.hpp"

namespace gb = grasseig::bench;

namespace {

struct ProblemFlags {
  std::string matrix;
  std::string fd3d;
  std::string preset;
  long long p = 0;
  std::string objective = "max";
  std::optional<double> shift;

  void add_to(CLI::App* app) {
    auto* m = app->add_option("--matrix", matrix, "Matrix Market file");
    auto* f = app->add_option("--fd3d", fd3d, "FD3D grid extents nx,ny,nz");
    auto* pr = app->add_option("--preset", preset, "Named problem preset");
    m->excludes(f)->excludes(pr);
    f->excludes(pr);
    app->add_option("--p", p, "Subspace dimension")->check(CLI::PositiveNumber);
    app->add_option("--objective", objective, "max or min")->check(CLI::IsMember({"max", "min"}));
    app->add_option("--shift", shift, "Add shift * I to the operator");
  }

  gb::ProblemSpec spec() const {
    gb::ProblemSpec s;
    if (!preset.empty()) {
      s = gb::preset(preset);
      if (p > 0) s.p = p;
    } else if (!fd3d.empty() || !matrix.empty()) {
      if (p <= 0) throw grasseig::ConfigurationError("--p is required with --fd3d and --matrix");
      s = fd3d.empty() ? gb::matrix_problem(matrix, p) : gb::fd3d_problem(gb::parse_extents(fd3d), p);
    } else {
      throw grasseig::ConfigurationError("one of --manifest, --matrix, --fd3d, --preset is required");
    }
    if (objective == "min") s.objective = gb::Objective::Min;
    if (shift) s.shift = shift;
    return s;
  }
};

void write_or_print(const std::string& text, const std::string& out) {
  if (out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(out, std::ios::binary);
  if (!f || !(f << text)) throw grasseig::IoError("cannot write " + out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Block eigensolver benchmark harness"};
  app.require_subcommand(1);

  // run
  auto* run = app.add_subcommand("run", "Run solvers and write one CSV trace per (solver, seed)");
  std::string manifest;
  ProblemFlags rp;
  std::vector<std::string> solvers{"agd"};
  int cheb_degree = 10;
  std::string variant = "retr";
  std::vector<std::uint64_t> seeds{0};
  std::optional<long long> max_iters;
  std::optional<double> tol;
  std::string out_dir = ".";
  std::string params_file;
  long long record_every = 1;
  bool no_timing = false;
  int jobs = 1;
  run->add_option("--manifest", manifest, "JSON run manifest")->check(CLI::ExistingFile);
  rp.add_to(run);
  run->add_option("--solver", solvers, "agd, sd, subspace, cheb, rcg (comma separated)")
      ->delimiter(',');
  run->add_option("--cheb-degree", cheb_degree, "Chebyshev filter degree")->check(CLI::PositiveNumber);
  run->add_option("--variant", variant, "AGD gradient step: exp or retr")
      ->check(CLI::IsMember({"exp", "retr"}));
  run->add_option("--seed", seeds, "Random start seeds (comma separated)")->delimiter(',');
  run->add_option("--max-iters", max_iters, "Iteration cap");
  run->add_option("--tol", tol, "Suboptimality tolerance (gradient norm without a reference)");
  run->add_option("--out", out_dir, "Output directory");
  run->add_option("--params", params_file, "Parameter JSON (lambda1, lambdaP, lambdaP1, lambdaN)")
      ->check(CLI::ExistingFile);
  run->add_option("--record-every", record_every, "Record every k-th iterate")
      ->check(CLI::PositiveNumber);
  run->add_flag("--no-timing", no_timing, "Leave wall_time_s empty for reproducible files");
  run->add_option("--jobs", jobs, "Parallel workers")->check(CLI::PositiveNumber);

  // params
  auto* params = app.add_subcommand("params", "Write spectral parameters as JSON");
  ProblemFlags pp;
  std::string params_out;
  pp.add_to(params);
  params->add_option("--out", params_out, "Output file (default stdout)");

  // verify
  auto* verify = app.add_subcommand("verify", "Run numeric property suites");
  std::string suite;
  std::uint64_t verify_seed = 1;
  std::string verify_out;
  verify->add_option("suite", suite, "geometry, convexity, solvers (default all)");
  verify->add_option("--seed", verify_seed, "Sampling seed");
  verify->add_option("--out", verify_out, "Output file (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      gb::RunManifest m;
      if (!manifest.empty()) {
        m = gb::load_manifest(manifest);
        if (run->count("--out")) m.out_dir = out_dir;
        if (run->count("--jobs")) m.jobs = jobs;
        if (no_timing) m.timing = false;
      } else {
        m.problem = rp.spec();
        for (const auto& s : solvers) {
          gb::SolverSpec spec;
          spec.kind = grasseig::parse_solver(s);
          spec.variant = gb::parse_variant(variant);
          spec.cheb_degree = cheb_degree;
          m.solvers.push_back(spec);
        }
        m.seeds = seeds;
        m.out_dir = out_dir;
        if (!params_file.empty()) m.params_file = params_file;
        m.max_iters = max_iters;
        m.tol = tol;
        m.record_every = record_every;
        m.timing = !no_timing;
        m.jobs = jobs;
      }
      bool failed = false;
      for (const auto& r : gb::cmd_run(m)) {
        std::printf("%s  stop=%s iters=%lld block_matvecs=%llu%s\n", r.file.string().c_str(),
                    r.stop_reason.c_str(), static_cast<long long>(r.iterations),
                    static_cast<unsigned long long>(r.block_matvecs),
                    r.failure ? (" failure: " + *r.failure).c_str() : "");
        failed = failed || r.failure.has_value();
      }
      return failed ? 1 : 0;
    }
    if (*params) {
      write_or_print(gb::cmd_params(pp.spec()), params_out);
      return 0;
    }
    if (*verify) {
      const gb::VerifyReport rep = gb::cmd_verify(suite, verify_seed);
      write_or_print(rep.json(), verify_out);
      return rep.pass ? 0 : 1;
    }
  } catch (const grasseig::Error& e) {
    std::fprintf(stderr, "grasseig: %s\n", e.what());
    return 2;
  }
  return 0;
}
