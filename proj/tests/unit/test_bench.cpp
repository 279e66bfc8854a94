#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "grasseig/errors.hpp"
#include "grasseig_bench/commands.hpp"
#include "grasseig_bench/trace_io.hpp"
#include "oracles.hpp"

using namespace grasseig;
using namespace grasseig::bench;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

// Everything after the metadata block.
std::string body(const fs::path& p) {
  const std::string s = slurp(p);
  const auto pos = s.find(kTraceColumns);
  return pos == std::string::npos ? std::string() : s.substr(pos);
}

double json_number(const std::string& json, const std::string& key) {
  const auto pos = json.find("\"" + key + "\":");
  if (pos == std::string::npos) return std::numeric_limits<double>::quiet_NaN();
  return std::strtod(json.c_str() + pos + key.size() + 3, nullptr);
}

std::string json_string(const std::string& json, const std::string& key) {
  const auto pos = json.find("\"" + key + "\": \"");
  if (pos == std::string::npos) return {};
  const auto start = pos + key.size() + 5;
  return json.substr(start, json.find('"', start) - start);
}

class ScratchDir : public ::testing::Test {
 protected:
  void SetUp() override { dir = oracle::temp_path("bench"); fs::create_directories(dir); }
  void TearDown() override { fs::remove_all(dir); }
  fs::path dir;
};

}  // namespace

// ---------------------------------------------------------------------------
// trace files

TEST(TraceIo, FormatDoubleRoundTrips) {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, -2.5e17, 123456789.123456789}) {
    EXPECT_EQ(std::strtod(format_double(v).c_str(), nullptr), v);
  }
}

TEST(TraceIo, HashIsStableAndSensitive) {
  const Matrix a = oracle::gaussian(5, 2, 1);
  Matrix b = a;
  EXPECT_EQ(hash_matrix(a), hash_matrix(b));
  EXPECT_EQ(hash_matrix(a).size(), 16u);
  b(3, 1) = std::nextafter(b(3, 1), 10.0);
  EXPECT_NE(hash_matrix(a), hash_matrix(b));
}

TEST_F(ScratchDir, CsvRoundTripWithEmptyFields) {
  std::vector<TraceRow> rows(3);
  for (int i = 0; i < 3; ++i) {
    rows[i].iter = i;
    rows[i].block_matvecs = 2 * i + 2;
    rows[i].fval = -1.0 / (i + 3.0);
    rows[i].grad_norm = std::pow(0.1, i);
  }
  rows[1].subopt = 1e-3;
  rows[1].dist = 0.25;
  rows[2].wall_time_s = 0.5;
  const Metadata meta{{"problem", "demo"}, {"seed", "4"}};
  const fs::path p = dir / "t.csv";
  write_trace_csv(p, meta, rows);

  const std::string text = slurp(p);
  EXPECT_EQ(text.rfind("# problem: demo\n# seed: 4\n", 0), 0u);
  EXPECT_NE(text.find(std::string(kTraceColumns) + "\n"), std::string::npos);
  EXPECT_NE(text.find("\n0,2,"), std::string::npos);

  const TraceFile t = read_trace_csv(p);
  EXPECT_EQ(t.get("problem"), "demo");
  EXPECT_FALSE(t.get("missing"));
  ASSERT_EQ(t.rows.size(), 3u);
  for (int i = 0; i < 3; ++i) {
    EXPECT_EQ(t.rows[i].iter, rows[i].iter);
    EXPECT_EQ(t.rows[i].block_matvecs, rows[i].block_matvecs);
    EXPECT_EQ(t.rows[i].fval, rows[i].fval);
    EXPECT_EQ(t.rows[i].grad_norm, rows[i].grad_norm);
    EXPECT_EQ(t.rows[i].subopt, rows[i].subopt);
    EXPECT_EQ(t.rows[i].dist, rows[i].dist);
    EXPECT_EQ(t.rows[i].wall_time_s, rows[i].wall_time_s);
  }
}

TEST_F(ScratchDir, MalformedCsv) {
  std::ofstream(dir / "bad.csv") << "iter,fval\n1,2\n";
  EXPECT_THROW(read_trace_csv(dir / "bad.csv"), FormatError);
  std::ofstream(dir / "short.csv") << kTraceColumns << "\n1,2,3\n";
  EXPECT_THROW(read_trace_csv(dir / "short.csv"), FormatError);
  EXPECT_THROW(read_trace_csv(dir / "none.csv"), IoError);
}

// ---------------------------------------------------------------------------
// problems

TEST(Problems, PresetsResolve) {
  for (const std::string& name : preset_names()) EXPECT_NO_THROW(preset(name)) << name;
  EXPECT_THROW(preset("nope"), ConfigurationError);
  const ProblemSpec s = preset("fd3d-small");
  EXPECT_EQ(s.fd3d.nx * s.fd3d.ny * s.fd3d.nz, 960);
  EXPECT_EQ(s.p, 16);
}

TEST(Problems, ParseExtents) {
  const Fd3dSpec g = parse_extents("10,12,8");
  EXPECT_EQ(g.nx, 10);
  EXPECT_EQ(g.ny, 12);
  EXPECT_EQ(g.nz, 8);
  EXPECT_THROW(parse_extents("10,12"), ConfigurationError);
  EXPECT_THROW(parse_extents("a,b,c"), ConfigurationError);
}

TEST(Problems, MinObjectiveReversesSpectrum) {
  ProblemSpec s = fd3d_problem({4, 3, 2}, 2);
  s.objective = Objective::Min;
  const Problem pr = prepare(s);
  ASSERT_TRUE(pr.spectrum && pr.reference);
  const Vector lam = oracle::eigenvalues_desc(oracle::fd3d_dense(4, 3, 2));
  // smallest two eigenvalues of A, mapped through s A + alpha
  EXPECT_NEAR(pr.spectrum->eigenvalues(0), -lam(23) + pr.offset, 1e-10);
  EXPECT_NEAR(pr.spectrum->eigenvalues(1), -lam(22) + pr.offset, 1e-10);
  EXPECT_NEAR(pr.params.delta, lam(21) - lam(22), 1e-10);
  EXPECT_EQ(pr.scale, -1.0);
  const Matrix v = pr.reference->v_alpha.rep();
  const Matrix av = oracle::fd3d_dense(4, 3, 2) * v;
  EXPECT_LT((av - v * (v.transpose() * av)).norm(), 1e-9);
}

TEST(Problems, ShiftMovesEveryEigenvalue) {
  ProblemSpec s = fd3d_problem({4, 3, 2}, 2);
  const Problem a = prepare(s);
  s.shift = 5.0;
  const Problem b = prepare(s);
  EXPECT_NEAR(b.params.lambda1, a.params.lambda1 + 5.0, 1e-12);
  EXPECT_NEAR(b.params.delta, a.params.delta, 1e-12);
  EXPECT_NEAR(b.reference->fstar, a.reference->fstar - 10.0, 1e-10);
}

TEST(Problems, SizeErrorAboveCapWithoutParameters) {
  const fs::path m = oracle::write_text("big.mtx",
                                        "%%MatrixMarket matrix coordinate real symmetric\n"
                                        "30 30 30\n" +
                                            [] {
                                              std::string s;
                                              for (int i = 1; i <= 30; ++i)
                                                s += std::to_string(i) + " " + std::to_string(i) + " " +
                                                     std::to_string(i) + "\n";
                                              return s;
                                            }());
  ::setenv("GRASSEIG_ORACLE_CAP", "10", 1);
  EXPECT_THROW(prepare(matrix_problem(m, 3)), SizeError);
  const fs::path pf = oracle::write_text("p.json",
                                         R"({"lambda1": 30, "lambdaP": 28, "lambdaP1": 27, "lambdaN": 1})");
  const Problem pr = prepare(matrix_problem(m, 3), pf);
  EXPECT_EQ(pr.param_source, ParamSource::File);
  EXPECT_FALSE(pr.reference);
  EXPECT_DOUBLE_EQ(pr.params.delta, 1.0);
  ::unsetenv("GRASSEIG_ORACLE_CAP");
  fs::remove(m);
  fs::remove(pf);
}

// ---------------------------------------------------------------------------
// params command

TEST(Params, WorkedExampleFromMatrixFile) {
  const fs::path m = oracle::write_text("diag.mtx",
                                        "%%MatrixMarket matrix coordinate real general\n"
                                        "4 4 4\n1 1 4\n2 2 3\n3 3 1\n4 4 0.5\n");
  const std::string j = cmd_params(matrix_problem(m, 2));
  EXPECT_DOUBLE_EQ(json_number(j, "delta"), 2.0);
  EXPECT_DOUBLE_EQ(json_number(j, "gamma"), 7.0);
  EXPECT_DOUBLE_EQ(json_number(j, "kappaR"), 1.75);
  EXPECT_NEAR(json_number(j, "mu"), 1.6211, 1e-4);
  EXPECT_EQ(json_number(j, "n"), 4.0);
  EXPECT_EQ(json_string(j, "source"), "oracle");
  fs::remove(m);
}

TEST(Params, Fd3dUsesAnalyticFormula) {
  const std::string j = cmd_params(preset("fd3d-small"));
  EXPECT_EQ(json_string(j, "source"), "analytic");
  const Vector lam = oracle::eigenvalues_desc(oracle::fd3d_dense(10, 12, 8));
  EXPECT_NEAR(json_number(j, "lambda1"), lam(0), 1e-10);
  EXPECT_NEAR(json_number(j, "delta"), lam(15) - lam(16), 1e-10);
  EXPECT_NEAR(json_number(j, "kappaR"), (lam(0) - lam(959)) / (lam(15) - lam(16)), 1e-6);
}

TEST(Params, RejectsPAtLeastN) {
  EXPECT_THROW(cmd_params(fd3d_problem({2, 2, 2}, 8)), DomainError);
}

// ---------------------------------------------------------------------------
// run command

TEST_F(ScratchDir, ManifestRunWritesOneFilePerSolverAndSeed) {
  const fs::path mf = dir / "m.json";
  std::ofstream(mf) << R"({
    "problem": {"fd3d": [6, 5, 4], "p": 3},
    "solvers": ["agd", {"name": "sd"}],
    "seeds": [3, 4],
    "out": "traces",
    "max_iters": 12,
    "timing": false
  })";
  const RunManifest m = load_manifest(mf);
  EXPECT_EQ(m.out_dir, dir / "traces");
  const std::vector<RunRecord> recs = cmd_run(m);
  ASSERT_EQ(recs.size(), 4u);

  std::set<std::string> names;
  for (const RunRecord& r : recs) {
    EXPECT_FALSE(r.failure);
    ASSERT_TRUE(fs::exists(r.file));
    names.insert(r.file.filename().string());
  }
  EXPECT_EQ(names, (std::set<std::string>{"fd3d-6x5x4_agd_s3.csv", "fd3d-6x5x4_agd_s4.csv",
                                          "fd3d-6x5x4_sd_s3.csv", "fd3d-6x5x4_sd_s4.csv"}));

  const TraceFile a3 = read_trace_csv(dir / "traces" / "fd3d-6x5x4_agd_s3.csv");
  const TraceFile s3 = read_trace_csv(dir / "traces" / "fd3d-6x5x4_sd_s3.csv");
  const TraceFile a4 = read_trace_csv(dir / "traces" / "fd3d-6x5x4_agd_s4.csv");
  EXPECT_EQ(a3.get("x0_hash"), s3.get("x0_hash"));
  EXPECT_NE(a3.get("x0_hash"), a4.get("x0_hash"));
  for (const TraceFile* t : {&a3, &s3}) {
    EXPECT_EQ(t->get("problem"), "fd3d-6x5x4");
    EXPECT_EQ(t->get("n"), "120");
    EXPECT_EQ(t->get("p"), "3");
    EXPECT_EQ(t->get("seed"), "3");
    EXPECT_EQ(t->get("param_source"), "analytic");
    EXPECT_EQ(t->get("reference"), "dense");
    EXPECT_TRUE(t->get("kappaR"));
    EXPECT_FALSE(t->get("started_at"));
    ASSERT_EQ(t->rows.size(), 13u);
    for (const TraceRow& r : t->rows) {
      EXPECT_TRUE(r.subopt && r.dist);
      EXPECT_FALSE(r.wall_time_s);
    }
  }
  EXPECT_EQ(a3.get("solver"), "agd");
  EXPECT_EQ(a3.get("variant"), "retr");
  EXPECT_EQ(a3.rows.back().block_matvecs, 26u);
  EXPECT_EQ(s3.rows.back().block_matvecs, 13u);
}

TEST_F(ScratchDir, RunsAreByteDeterministicWithoutTiming) {
  RunManifest m;
  m.problem = preset("clustered");
  SolverSpec agd, cheb;
  cheb.kind = SolverKind::Chebyshev;
  cheb.cheb_degree = 4;
  m.solvers = {agd, cheb};
  m.seeds = {7};
  m.max_iters = 15;
  m.timing = false;
  m.out_dir = dir / "a";
  const auto r1 = cmd_run(m);
  m.out_dir = dir / "b";
  m.jobs = 2;
  const auto r2 = cmd_run(m);
  ASSERT_EQ(r1.size(), r2.size());
  for (std::size_t i = 0; i < r1.size(); ++i) {
    EXPECT_EQ(r1[i].file.filename(), r2[i].file.filename());
    EXPECT_EQ(slurp(r1[i].file), slurp(r2[i].file)) << r1[i].file;
    EXPECT_FALSE(body(r1[i].file).empty());
  }
  EXPECT_EQ(r1[1].file.filename(), "clustered_cheb-d4_s7.csv");
}

TEST_F(ScratchDir, NoReferenceLeavesEmptyFields) {
  const fs::path m = dir / "d.mtx";
  std::ofstream(m) << "%%MatrixMarket matrix coordinate real symmetric\n30 30 30\n";
  for (int i = 1; i <= 30; ++i) std::ofstream(m, std::ios::app) << i << " " << i << " " << i << "\n";
  const fs::path pf = dir / "p.json";
  std::ofstream(pf) << R"({"lambda1": 30, "lambdaP": 28, "lambdaP1": 27, "lambdaN": 1})";
  ::setenv("GRASSEIG_ORACLE_CAP", "10", 1);
  RunManifest rm;
  rm.problem = matrix_problem(m, 3);
  rm.solvers = {SolverSpec{}};
  rm.params_file = pf;
  rm.max_iters = 5;
  rm.timing = false;
  rm.out_dir = dir / "out";
  const auto recs = cmd_run(rm);
  ::unsetenv("GRASSEIG_ORACLE_CAP");
  ASSERT_EQ(recs.size(), 1u);
  const TraceFile t = read_trace_csv(recs[0].file);
  EXPECT_EQ(t.get("reference"), "none");
  EXPECT_EQ(t.get("param_source"), "file");
  for (const TraceRow& r : t.rows) EXPECT_FALSE(r.subopt || r.dist);
  EXPECT_NE(body(recs[0].file).find("\n0,2,"), std::string::npos);
  EXPECT_NE(body(recs[0].file).find(",,,"), std::string::npos);
}

TEST_F(ScratchDir, PlantedGapAgdConverges) {
  const fs::path mf = dir / "pg.json";
  std::ofstream(mf) << R"({
    "problem": {"planted_gap": {"n": 150, "p": 4, "delta": 0.05, "rho": 0.5}},
    "solvers": [{"name": "agd"}, {"name": "agd", "variant": "exp"}],
    "tol": 1e-10,
    "timing": false
  })";
  RunManifest m = load_manifest(mf);
  m.out_dir = dir / "pg";
  const auto recs = cmd_run(m);
  ASSERT_EQ(recs.size(), 2u);
  for (const RunRecord& r : recs) {
    EXPECT_EQ(r.stop_reason, "subopt_tol") << r.label;
    ASSERT_TRUE(r.final_subopt);
    EXPECT_LE(*r.final_subopt, 1e-10);
    const TraceFile t = read_trace_csv(r.file);
    EXPECT_EQ(t.get("param_source"), "exact");
    for (std::size_t i = 1; i < t.rows.size(); ++i) EXPECT_LE(t.rows[i].fval, t.rows[i - 1].fval + 1e-10);
  }
  EXPECT_EQ(recs[1].label, "agd-exp");
}

TEST_F(ScratchDir, Fd3dSmallMetadata) {
  RunManifest m;
  m.problem = preset("fd3d-small");
  m.solvers = {SolverSpec{}};
  m.max_iters = 2;
  m.out_dir = dir;
  const auto recs = cmd_run(m);
  const TraceFile t = read_trace_csv(recs.at(0).file);
  EXPECT_NEAR(std::stod(*t.get("kappaR")), 159.28, 0.01);
  EXPECT_NEAR(std::stod(*t.get("delta")), 0.072077, 1e-6);
  EXPECT_TRUE(t.get("started_at"));
  for (const TraceRow& r : t.rows) EXPECT_TRUE(r.wall_time_s);
}

TEST_F(ScratchDir, ManifestErrors) {
  auto load = [&](const std::string& text) {
    std::ofstream(dir / "bad.json") << text;
    return load_manifest(dir / "bad.json");
  };
  EXPECT_THROW(load(R"({"problem": {"preset": "nope"}, "solvers": ["agd"]})"), ConfigurationError);
  EXPECT_THROW(load(R"({"problem": {"preset": "fd3d-small"}, "solvers": ["newton"]})"), ConfigurationError);
  EXPECT_THROW(load(R"({"problem": {"preset": "fd3d-small"}, "solvers": []})"), ConfigurationError);
  EXPECT_THROW(load(R"({"problem": {"preset": "fd3d-small"}, "solvers": ["agd"], "extra": 1})"),
               ConfigurationError);
  EXPECT_THROW(load(R"({"problem": {"preset": "fd3d-small", "fd3d": "1,1,2"}, "solvers": ["agd"]})"),
               ConfigurationError);
  EXPECT_ANY_THROW(load("{not json"));

  RunManifest m;
  m.problem = preset("fd3d-small");
  m.solvers = {SolverSpec{}, SolverSpec{}};
  m.out_dir = dir;
  EXPECT_THROW(cmd_run(m), ConfigurationError);
}

// ---------------------------------------------------------------------------
// verify command

TEST(Verify, GeometryReport) {
  const VerifyReport r = cmd_verify("geometry");
  EXPECT_TRUE(r.pass);
  const std::string j = r.json();
  EXPECT_NE(j.find("\"suite\": \"geometry\""), std::string::npos);
  EXPECT_NE(j.find("\"exp_log_roundtrip\""), std::string::npos);
  EXPECT_THROW(cmd_verify("everything"), ConfigurationError);
}
