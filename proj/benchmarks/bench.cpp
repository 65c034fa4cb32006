#include <benchmark/benchmark.h>

#include "gmsfem/fem.hpp"
#include "gmsfem/space.hpp"

using namespace gmsfem;

static void BM_AssembleStiffness(benchmark::State& state) {
  const Index n = state.range(0);
  const FineGrid fine = build_fine_grid(n, n);
  const CoefficientField kappa =
      channels_field(n, n, 1.0, 1e4, {{n / 4, 0, n / 4, n - 1}});
  for (auto _ : state) {
    SpMat A = assemble_stiffness(fine, kappa);
    benchmark::DoNotOptimize(A);
  }
}
BENCHMARK(BM_AssembleStiffness)->Arg(64)->Arg(128)->Arg(256);

static void BM_FineSolve(benchmark::State& state) {
  const Index n = state.range(0);
  const FineGrid fine = build_fine_grid(n, n);
  const CoefficientField one = constant_field(n, n, 1.0);
  const SpMat A = assemble_stiffness(fine, one);
  const Vec b = assemble_load(fine, [](double x, double y) { return x + y; });
  std::vector<Index> bnd;
  const auto mask = fine.boundary_mask();
  for (Index i = 0; i < fine.num_nodes(); ++i)
    if (mask[i]) bnd.push_back(i);
  const LinearSystem sys = apply_homogeneous_dirichlet(A, b, bnd);
  for (auto _ : state) {
    Vec u = solve_spd(sys);
    benchmark::DoNotOptimize(u);
  }
}
BENCHMARK(BM_FineSolve)->Arg(64)->Arg(128);

static void BM_NeumannPatchBasis(benchmark::State& state) {
  const Index n = state.range(0);
  const FineGrid fine = build_fine_grid(n, n);
  const CoarseGrid coarse = build_coarse_grid(fine, 4, 4);
  const CoefficientField kappa =
      channels_field(n, n, 1.0, 1e4, {{n / 4, 0, n / 4, n - 1}});
  EigOptions opts;
  opts.iterative_threshold = 512;
  for (auto _ : state) {
    LocalBasis b = neumann_patch_basis(coarse, coarse.node(2, 2), kappa, 10, opts);
    benchmark::DoNotOptimize(b);
  }
}
BENCHMARK(BM_NeumannPatchBasis)->Arg(32)->Arg(64);

BENCHMARK_MAIN();
