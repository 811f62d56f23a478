#include <benchmark/benchmark.h>

#include "pdq/generate.hpp"
#include "pdq/linalg.hpp"
#include "pdq/random.hpp"
#include "pdq/solver.hpp"
#include "pdq/tensor.hpp"

using namespace pdq;

namespace {

SolverConfig one_sweep(Index k) {
  SolverConfig c;
  c.rank = k;
  c.init = InitKind::random;
  c.fixed_sweeps = true;
  c.max_sweeps = 1;
  return c;
}

void set_flops(benchmark::State& state, const Factorization& f) {
  state.counters["sweep_flops"] = static_cast<double>(f.sweep_flops.back().total());
  state.counters["flop_rate"] = benchmark::Counter(static_cast<double>(f.sweep_flops.back().total()),
                                                   benchmark::Counter::kIsIterationInvariantRate);
}

void BM_DenseSweep(benchmark::State& state) {
  const auto n = static_cast<Index>(state.range(0));
  const auto k = static_cast<Index>(state.range(1));
  const DenseMatrix a = Rng(n).gaussian(n, n);
  const SolverConfig c = one_sweep(k);
  Factorization f;
  for (auto _ : state) benchmark::DoNotOptimize(f = solve(a, c, RegularizerSpec{}));
  set_flops(state, f);
}
BENCHMARK(BM_DenseSweep)->ArgsProduct({{256, 512, 1024}, {16}})->Unit(benchmark::kMillisecond);

void BM_UnconstrainedRidgeSweep(benchmark::State& state) {
  const auto n = static_cast<Index>(state.range(0));
  const DenseMatrix a = Rng(n).gaussian(n, n);
  SolverConfig c = one_sweep(16);
  c.orthonormalize = false;
  RegularizerSpec ridge;
  ridge.lambda = ridge.mu = ridge.nu = 1e-2;
  Factorization f;
  for (auto _ : state) benchmark::DoNotOptimize(f = solve(a, c, ridge));
  set_flops(state, f);
}
BENCHMARK(BM_UnconstrainedRidgeSweep)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);

void BM_SparseSweep(benchmark::State& state) {
  const auto n = static_cast<Index>(state.range(0));
  const SparseMatrix a = gen::sparse(n, n, 0.1, n);
  const SolverConfig c = one_sweep(16);
  Factorization f;
  for (auto _ : state) benchmark::DoNotOptimize(f = solve(a, c, RegularizerSpec{}));
  set_flops(state, f);
}
BENCHMARK(BM_SparseSweep)->Arg(500)->Arg(1000)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_RankRestrictedSweep(benchmark::State& state) {
  const auto n = static_cast<Index>(state.range(0));
  const DenseMatrix a = Rng(n).gaussian(n, n);
  const SolverConfig c = one_sweep(16);
  Factorization f;
  for (auto _ : state) benchmark::DoNotOptimize(f = solve_rank_restricted(a, 8, c, RegularizerSpec{}));
  set_flops(state, f);
}
BENCHMARK(BM_RankRestrictedSweep)->Arg(256)->Arg(512)->Arg(1024)->Unit(benchmark::kMillisecond);

void BM_JacobiSvd(benchmark::State& state) {
  const auto n = static_cast<Index>(state.range(0));
  const DenseMatrix a = Rng(7).gaussian(n, n);
  for (auto _ : state) benchmark::DoNotOptimize(svd(a));
}
BENCHMARK(BM_JacobiSvd)->Arg(16)->Arg(64)->Arg(128)->Unit(benchmark::kMicrosecond);

void BM_ThinQr(benchmark::State& state) {
  const auto n = static_cast<Index>(state.range(0));
  const DenseMatrix a = Rng(8).gaussian(n, 16);
  for (auto _ : state) benchmark::DoNotOptimize(qr(a));
}
BENCHMARK(BM_ThinQr)->Arg(256)->Arg(1024)->Unit(benchmark::kMicrosecond);

void BM_Matmul(benchmark::State& state) {
  const auto n = static_cast<Index>(state.range(0));
  const DenseMatrix a = Rng(9).gaussian(n, n);
  const DenseMatrix b = Rng(10).gaussian(n, 16);
  for (auto _ : state) benchmark::DoNotOptimize(matmul(a, b));
  state.counters["flop_rate"] =
      benchmark::Counter(2.0 * n * n * 16, benchmark::Counter::kIsIterationInvariantRate);
}
BENCHMARK(BM_Matmul)->Arg(256)->Arg(1024)->Unit(benchmark::kMicrosecond);

void BM_SparseMatmul(benchmark::State& state) {
  const auto n = static_cast<Index>(state.range(0));
  const SparseMatrix a = gen::sparse(n, n, 0.1, 11);
  const DenseMatrix b = Rng(12).gaussian(n, 16);
  for (auto _ : state) benchmark::DoNotOptimize(matmul(a, b));
}
BENCHMARK(BM_SparseMatmul)->Arg(1000)->Arg(2000)->Unit(benchmark::kMicrosecond);

void BM_TuckerHooi(benchmark::State& state) {
  const auto n = static_cast<Index>(state.range(0));
  DenseTensor t({n, n, n});
  Rng rng(13);
  for (double& v : t.data()) v = rng.normal();
  const std::vector<Index> ranks{4, 4, 4};
  TuckerConfig c;
  c.max_sweeps = 5;
  for (auto _ : state) benchmark::DoNotOptimize(tucker_solve(t, ranks, c));
}
BENCHMARK(BM_TuckerHooi)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
