#include <benchmark/benchmark.h>

#include "grasseig/grassmann.hpp"
#include "grasseig/matops.hpp"
#include "grasseig/rayleigh.hpp"
#include "grasseig/solvers.hpp"

using namespace grasseig;

namespace {

void BM_ApplyBlockFd3d(benchmark::State& state) {
  const auto m = static_cast<Index>(state.range(0));
  const Index p = state.range(1);
  const SymmetricOperator a = build_fd3d({m, m, m});
  const Matrix x = random_point(a.size(), p, 1).rep();
  for (auto _ : state) benchmark::DoNotOptimize(a.apply_block(x));
  state.SetItemsProcessed(state.iterations() * a.nonzeros() * p);
}
BENCHMARK(BM_ApplyBlockFd3d)->Args({10, 16})->Args({20, 16})->Args({30, 32});

void BM_ExpMap(benchmark::State& state) {
  const SubspacePoint x = random_point(state.range(0), state.range(1), 2);
  const TangentVector g = random_tangent(x, 1.0, 3);
  for (auto _ : state) benchmark::DoNotOptimize(exp_map(g));
}
BENCHMARK(BM_ExpMap)->Args({1000, 16})->Args({10000, 32});

void BM_LogMap(benchmark::State& state) {
  const SubspacePoint x = random_point(state.range(0), state.range(1), 4);
  const SubspacePoint y = perturb_within(x, 1.0, 5);
  for (auto _ : state) benchmark::DoNotOptimize(log_map(x, y));
}
BENCHMARK(BM_LogMap)->Args({1000, 16})->Args({10000, 32});

void BM_GeodesicSearch(benchmark::State& state) {
  const SymmetricOperator a = build_fd3d({10, 12, 8});
  const SubspacePoint v = random_point(a.size(), 16, 6);
  const SubspacePoint x = perturb_within(v, 0.5, 7);
  const Matrix av = a.apply_block(v.rep());
  for (auto _ : state) benchmark::DoNotOptimize(geodesic_search(a, v, x, {}, &av));
}
BENCHMARK(BM_GeodesicSearch);

void BM_AgdIteration(benchmark::State& state) {
  const SymmetricOperator a = build_fd3d({20, 18, 16});
  const SpectralParams prm = derive_params(analytic_fd3d_eigenvalues({20, 18, 16}), 16);
  AgdState st = agd_init(random_point(a.size(), 16, 8), prm);
  for (auto _ : state) benchmark::DoNotOptimize(agd_step(st, a));
}
BENCHMARK(BM_AgdIteration);

}  // namespace
BENCHMARK_MAIN();
