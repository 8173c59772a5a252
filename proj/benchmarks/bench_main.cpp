// Microbenchmarks for the hot paths: assembly, the eigen solve, the
// criterion integral and the matrix cache round trip.
#include <benchmark/benchmark.h>

#include <cmath>
#include <filesystem>

#include "hardylab/assembly.hpp"
#include "hardylab/criterion.hpp"
#include "hardylab/eigensolve.hpp"
#include "hardylab/report.hpp"

using namespace hardylab;

namespace {

GeometryConfig reduced(int n_r, int n_z) {
  GeometryConfig g;
  g.n_r = n_r;
  g.n_z = n_z;
  return g;
}

WeightSpec sin_spec(const Grid& grid) { return validate_and_normalize(make_sin_family(0.5, 1.5, {0.0}), grid); }

}  // namespace

static void BM_Assemble(benchmark::State& state) {
  const Grid grid(reduced(static_cast<int>(state.range(0)), 16));
  const WeightSpec w = sin_spec(grid);
  for (auto _ : state) benchmark::DoNotOptimize(assemble_forms(grid, w));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(grid.cell_count()));
}
BENCHMARK(BM_Assemble)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

static void BM_SolveMu(benchmark::State& state) {
  const Grid grid(reduced(static_cast<int>(state.range(0)), 16));
  const auto forms = assemble_forms(grid, sin_spec(grid));
  for (auto _ : state) benchmark::DoNotOptimize(solve_mu(forms, 1.0));
}
BENCHMARK(BM_SolveMu)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

static void BM_FullTorusSolve(benchmark::State& state) {
  GeometryConfig g = reduced(12, 12);
  g.N = 4;
  g.model = Model::FullTorus;
  const Grid grid(g);
  const auto forms = assemble_forms(grid, sin_spec(grid));
  SolverOptions opt;
  opt.inner = InnerSolver::JacobiPcg;  // 4D fill rules out Cholesky
  for (auto _ : state) benchmark::DoNotOptimize(solve_mu(forms, 0.0, opt));
}
BENCHMARK(BM_FullTorusSolve)->Unit(benchmark::kMillisecond);

static void BM_CriterionIntegral(benchmark::State& state) {
  const Grid grid(reduced(16, 16));
  const WeightSpec w = sin_spec(grid);
  const double cap = std::ldexp(1.0, -static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(criterion_integral(w, w.maximizers, cap));
}
BENCHMARK(BM_CriterionIntegral)->Arg(8)->Arg(20)->Unit(benchmark::kMicrosecond);

static void BM_CriterionIntegral2D(benchmark::State& state) {
  GeometryConfig g = reduced(16, 8);
  g.N = 6;
  g.k = 2;
  const Grid grid(g);
  const WeightSpec w = validate_and_normalize(make_sin_family(0.5, 1.5, {0.0, 0.0}), grid);
  const double cap = std::ldexp(1.0, -static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(criterion_integral(w, {{0.0, 0.0}}, cap));
}
BENCHMARK(BM_CriterionIntegral2D)->Arg(8)->Arg(24)->Unit(benchmark::kMillisecond);

static void BM_CacheRoundTrip(benchmark::State& state) {
  const Grid grid(reduced(128, 16));
  const auto forms = assemble_forms(grid, sin_spec(grid));
  const auto path = std::filesystem::temp_directory_path() / "hardylab_bench.forms";
  for (auto _ : state) {
    save_forms(path, forms);
    benchmark::DoNotOptimize(load_forms(path, "bench"));
  }
  std::filesystem::remove(path);
}
BENCHMARK(BM_CacheRoundTrip)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
