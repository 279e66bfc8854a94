#include "grasseig_bench/commands.hpp"

#include <atomic>
#include <chrono>
#include <ctime>
#include <fstream>
#include <mutex>
#include <set>
#include <thread>

#include <nlohmann/json.hpp>

#include "grasseig/errors.hpp"
#include "grasseig/grassmann.hpp"
#include "grasseig_bench/trace_io.hpp"

namespace grasseig::bench {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

std::string SolverSpec::label() const {
  std::string s = solver_name(kind);
  if (kind == SolverKind::Agd && variant == AgdVariant::Exp) s += "-exp";
  if (kind == SolverKind::Chebyshev) s += "-d" + std::to_string(cheb_degree);
  return s;
}

AgdVariant parse_variant(const std::string& s) {
  if (s == "retr" || s == "retraction") return AgdVariant::Retraction;
  if (s == "exp") return AgdVariant::Exp;
  throw ConfigurationError("unknown AGD variant '" + s + "' (expected exp or retr)");
}

std::string variant_name(AgdVariant v) { return v == AgdVariant::Exp ? "exp" : "retr"; }

// ---------------------------------------------------------------------------
// manifest

namespace {

void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& what) {
  for (const auto& [k, v] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || k == a;
    if (!ok) throw ConfigurationError(what + ": unknown key '" + k + "'");
  }
}

template <class T>
T get_as(const json& j, const char* key, const std::string& what) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigurationError(what + ": bad or missing '" + key + "': " + e.what());
  }
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  const std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

ProblemSpec parse_problem(const json& j, const std::filesystem::path& base) {
  const std::string what = "manifest problem";
  if (!j.is_object()) throw ConfigurationError(what + " must be an object");
  check_keys(j, {"preset", "fd3d", "matrix", "planted_gap", "p", "objective", "shift", "name"}, what);
  const int sources = int(j.contains("preset")) + int(j.contains("fd3d")) +
                      int(j.contains("matrix")) + int(j.contains("planted_gap"));
  if (sources != 1) {
    throw ConfigurationError(what + " needs exactly one of preset, fd3d, matrix, planted_gap");
  }
  ProblemSpec s;
  if (j.contains("preset")) {
    s = preset(get_as<std::string>(j, "preset", what));
  } else if (j.contains("fd3d")) {
    const json& e = j.at("fd3d");
    Fd3dSpec grid;
    if (e.is_string()) {
      grid = parse_extents(e.get<std::string>());
    } else if (e.is_array() && e.size() == 3) {
      grid = {e[0].get<Index>(), e[1].get<Index>(), e[2].get<Index>()};
    } else {
      throw ConfigurationError(what + ": fd3d must be \"nx,ny,nz\" or [nx, ny, nz]");
    }
    s = fd3d_problem(grid, get_as<Index>(j, "p", what));
  } else if (j.contains("matrix")) {
    s = matrix_problem(resolve(base, get_as<std::string>(j, "matrix", what)),
                       get_as<Index>(j, "p", what));
  } else {
    const json& g = j.at("planted_gap");
    check_keys(g, {"n", "p", "delta", "rho", "lambda_n", "seed"}, what + " planted_gap");
    PlantedGapSpec ps;
    ps.n = g.value("n", ps.n);
    ps.p = g.value("p", ps.p);
    ps.delta = g.value("delta", ps.delta);
    ps.rho = g.value("rho", ps.rho);
    ps.lambda_n = g.value("lambda_n", ps.lambda_n);
    ps.seed = g.value("seed", ps.seed);
    s.source = ProblemSpec::Source::PlantedGap;
    s.planted = ps;
    s.p = ps.p;
    s.name = "planted-n" + std::to_string(ps.n) + "-p" + std::to_string(ps.p);
  }
  if (j.contains("p")) s.p = get_as<Index>(j, "p", what);
  if (j.contains("objective")) s.objective = parse_objective(get_as<std::string>(j, "objective", what));
  if (j.contains("shift")) s.shift = get_as<double>(j, "shift", what);
  if (j.contains("name")) s.name = get_as<std::string>(j, "name", what);
  if (s.p < 1) throw ConfigurationError(what + ": p must be >= 1");
  return s;
}

SolverSpec parse_solver_entry(const json& j) {
  SolverSpec s;
  if (j.is_string()) {
    s.kind = parse_solver(j.get<std::string>());
    return s;
  }
  const std::string what = "manifest solver";
  if (!j.is_object()) throw ConfigurationError(what + " must be a name or an object");
  check_keys(j, {"name", "variant", "degree"}, what);
  s.kind = parse_solver(get_as<std::string>(j, "name", what));
  if (j.contains("variant")) s.variant = parse_variant(get_as<std::string>(j, "variant", what));
  if (j.contains("degree")) s.cheb_degree = get_as<int>(j, "degree", what);
  if (s.cheb_degree < 1) throw ConfigurationError(what + ": Chebyshev degree must be >= 1");
  return s;
}

}  // namespace

RunManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw FormatError("manifest " + path.string() + ": " + e.what());
  }
  const std::string what = "manifest";
  if (!j.is_object()) throw ConfigurationError(what + " must be a JSON object");
  check_keys(j,
             {"problem", "solvers", "seeds", "out", "params", "max_iters", "tol", "record_every",
              "timing", "jobs"},
             what);
  const std::filesystem::path base = path.parent_path();
  RunManifest m;
  if (!j.contains("problem")) throw ConfigurationError(what + ": missing 'problem'");
  m.problem = parse_problem(j.at("problem"), base);
  if (!j.contains("solvers") || !j.at("solvers").is_array() || j.at("solvers").empty()) {
    throw ConfigurationError(what + ": 'solvers' must be a non-empty array");
  }
  for (const auto& s : j.at("solvers")) m.solvers.push_back(parse_solver_entry(s));
  if (j.contains("seeds")) m.seeds = get_as<std::vector<std::uint64_t>>(j, "seeds", what);
  if (m.seeds.empty()) throw ConfigurationError(what + ": 'seeds' must not be empty");
  if (j.contains("out")) m.out_dir = resolve(base, get_as<std::string>(j, "out", what));
  else m.out_dir = base.empty() ? std::filesystem::path(".") : base;
  if (j.contains("params")) m.params_file = resolve(base, get_as<std::string>(j, "params", what));
  if (j.contains("max_iters")) m.max_iters = get_as<std::int64_t>(j, "max_iters", what);
  if (j.contains("tol")) m.tol = get_as<double>(j, "tol", what);
  if (j.contains("record_every")) m.record_every = get_as<std::int64_t>(j, "record_every", what);
  if (j.contains("timing")) m.timing = get_as<bool>(j, "timing", what);
  if (j.contains("jobs")) m.jobs = get_as<int>(j, "jobs", what);
  return m;
}

// ---------------------------------------------------------------------------
// run

namespace {

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string source_description(const ProblemSpec& s) {
  switch (s.source) {
    case ProblemSpec::Source::MatrixMarket: return "matrix-market " + s.matrix.string();
    case ProblemSpec::Source::Fd3d:
      return "fd3d " + std::to_string(s.fd3d.nx) + "," + std::to_string(s.fd3d.ny) + "," +
             std::to_string(s.fd3d.nz);
    case ProblemSpec::Source::PlantedGap: {
      const PlantedGapSpec& g = s.planted;
      return "planted-gap n=" + std::to_string(g.n) + " delta=" + format_double(g.delta) +
             " rho=" + format_double(g.rho) + " lambda_n=" + format_double(g.lambda_n) +
             " seed=" + std::to_string(g.seed);
    }
  }
  return "unknown";
}

void add_params(Metadata& meta, const SpectralParams& p) {
  meta.emplace_back("lambda1", format_double(p.lambda1));
  meta.emplace_back("lambdaP", format_double(p.lambdaP));
  meta.emplace_back("lambdaP1", format_double(p.lambdaP1));
  meta.emplace_back("lambdaN", format_double(p.lambdaN));
  meta.emplace_back("delta", format_double(p.delta));
  meta.emplace_back("mu", format_double(p.mu));
  meta.emplace_back("gamma", format_double(p.gamma));
  meta.emplace_back("gammaTilde", format_double(p.gammaTilde));
  meta.emplace_back("kappaR", format_double(p.kappaR));
}

struct Task {
  SolverSpec solver;
  std::uint64_t seed;
};

}  // namespace

std::vector<RunRecord> cmd_run(const RunManifest& m) {
  if (m.solvers.empty()) throw ConfigurationError("run needs at least one solver");
  if (m.seeds.empty()) throw ConfigurationError("run needs at least one seed");
  if (m.record_every < 1) throw ConfigurationError("record_every must be >= 1");
  if (m.jobs < 1) throw ConfigurationError("jobs must be >= 1");
  std::set<std::string> labels;
  for (const auto& s : m.solvers) {
    if (!labels.insert(s.label()).second) {
      throw ConfigurationError("solver '" + s.label() + "' listed twice");
    }
  }
  std::error_code ec;
  std::filesystem::create_directories(m.out_dir, ec);
  if (ec || !std::filesystem::is_directory(m.out_dir)) {
    throw IoError("cannot create output directory " + m.out_dir.string());
  }

  const Problem pr = prepare(m.problem, m.params_file);
  const Reference* ref = pr.reference ? &*pr.reference : nullptr;

  std::vector<Task> tasks;
  for (std::uint64_t seed : m.seeds)
    for (const auto& s : m.solvers) tasks.push_back({s, seed});

  std::vector<RunRecord> records(tasks.size());
  std::atomic<std::size_t> next{0};
  std::mutex err_mu;
  std::exception_ptr first_error;

  auto work = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      try {
        const Task& t = tasks[i];
        const SubspacePoint x0 = random_point(pr.op.size(), pr.p, t.seed);
        SolverConfig cfg;
        cfg.max_iters = m.max_iters;
        if (m.tol) {
          if (ref) {
            cfg.subopt_tol = *m.tol;
            cfg.grad_tol = std::numeric_limits<double>::infinity();
          } else {
            cfg.grad_tol = *m.tol;
          }
        }
        cfg.record_every = m.record_every;
        cfg.record_time = m.timing;
        cfg.agd.variant = t.solver.variant;
        cfg.cheb_degree = t.solver.cheb_degree;
        const std::string started = m.timing ? utc_now() : std::string();
        const SolverTrace tr = run(t.solver.kind, pr.op, x0, pr.params, cfg, ref);

        Metadata meta;
        meta.emplace_back("problem", pr.name);
        meta.emplace_back("source", source_description(m.problem));
        meta.emplace_back("n", std::to_string(pr.op.size()));
        meta.emplace_back("p", std::to_string(pr.p));
        meta.emplace_back("objective", objective_name(m.problem.objective));
        meta.emplace_back("operator_scale", format_double(pr.scale));
        meta.emplace_back("operator_shift", format_double(pr.offset));
        meta.emplace_back("solver", tr.solver);
        meta.emplace_back("label", t.solver.label());
        if (t.solver.kind == SolverKind::Agd) {
          meta.emplace_back("variant", variant_name(t.solver.variant));
          meta.emplace_back("gamma0", format_double(tr.gamma0));
        }
        if (t.solver.kind == SolverKind::Chebyshev) {
          meta.emplace_back("cheb_degree", std::to_string(t.solver.cheb_degree));
          meta.emplace_back("cheb_lo", format_double(pr.params.lambdaN));
          meta.emplace_back("cheb_hi", format_double(pr.params.lambdaP1));
        }
        meta.emplace_back("seed", std::to_string(t.seed));
        meta.emplace_back("x0_hash", hash_matrix(x0.rep()));
        meta.emplace_back("param_source", param_source_name(pr.param_source));
        add_params(meta, pr.params);
        meta.emplace_back("reference", ref ? "dense" : "none");
        if (ref) meta.emplace_back("fstar", format_double(ref->fstar));
        if (m.tol) meta.emplace_back("tol", format_double(*m.tol));
        meta.emplace_back("setup_products", std::to_string(tr.setup_products));
        meta.emplace_back("stop_reason", tr.stop_reason);
        meta.emplace_back("iterations", std::to_string(tr.iterations));
        for (const auto& w : tr.warnings) meta.emplace_back("warning", w);
        if (tr.failure) meta.emplace_back("failure", *tr.failure);
        if (m.timing) meta.emplace_back("started_at", started);

        RunRecord& r = records[i];
        r.label = t.solver.label();
        r.seed = t.seed;
        r.file = m.out_dir / (pr.name + "_" + r.label + "_s" + std::to_string(t.seed) + ".csv");
        r.stop_reason = tr.stop_reason;
        r.failure = tr.failure;
        r.iterations = tr.iterations;
        if (!tr.rows.empty()) {
          r.block_matvecs = tr.rows.back().block_matvecs;
          r.final_subopt = tr.rows.back().subopt;
        }
        write_trace_csv(r.file, meta, tr.rows);
      } catch (...) {
        std::lock_guard lock(err_mu);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };

  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(m.jobs), tasks.size());
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  if (first_error) std::rethrow_exception(first_error);
  return records;
}

// ---------------------------------------------------------------------------
// params, verify

std::string cmd_params(const ProblemSpec& spec) {
  const Problem pr = prepare(spec, std::nullopt, false);
  const SpectralParams& p = pr.params;
  ordered_json j;
  j["n"] = pr.op.size();
  j["p"] = pr.p;
  j["lambda1"] = p.lambda1;
  j["lambdaP"] = p.lambdaP;
  j["lambdaP1"] = p.lambdaP1;
  j["lambdaN"] = p.lambdaN;
  j["delta"] = p.delta;
  j["mu"] = p.mu;
  j["gamma"] = p.gamma;
  j["gammaTilde"] = p.gammaTilde;
  j["kappaR"] = p.kappaR;
  j["degenerate"] = p.degenerate;
  j["source"] = param_source_name(pr.param_source);
  return j.dump(2) + "\n";
}

std::string VerifyReport::json() const {
  ordered_json j;
  j["suite"] = suite.empty() ? "all" : suite;
  j["pass"] = pass;
  ordered_json arr = ordered_json::array();
  for (const auto& r : results) {
    ordered_json e;
    e["name"] = r.name;
    e["samples"] = r.samples;
    e["max_violation"] = r.max_violation;
    e["tolerance"] = r.tolerance;
    e["pass"] = r.pass;
    arr.push_back(std::move(e));
  }
  j["results"] = std::move(arr);
  return j.dump(2) + "\n";
}

VerifyReport cmd_verify(const std::string& suite, std::uint64_t seed) {
  VerifyReport rep;
  rep.suite = suite;
  rep.results = verify_suite(suite, seed);
  rep.pass = !rep.results.empty();
  for (const auto& r : rep.results) rep.pass = rep.pass && r.pass;
  return rep;
}

}  // namespace grasseig::bench
