#include <benchmark/benchmark.h>

#include <prony/matrix_assembly.hpp>
#include <prony/parallel.hpp>

namespace {

using namespace prony;

// args: d, n, workers
void BM_BuildT(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const int n = static_cast<int>(state.range(1));
  const WorkerPool pool(static_cast<int>(state.range(2)));
  const SampleGrid grid = sample_grid(standard_test_family(d, 5), n, {});
  const IndexSet idx = index_set(n, d);
  for (auto _ : state) benchmark::DoNotOptimize(build_T(grid, idx, &pool));
  state.counters["N"] = static_cast<double>(idx.size());
}

// Streamed T_1 V against the materialised product, r = 10 columns.
void BM_StreamedShiftProduct(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const int n = static_cast<int>(state.range(1));
  const WorkerPool pool(static_cast<int>(state.range(2)));
  const SampleGrid grid = sample_grid(standard_test_family(d, 5), n, {});
  const IndexSet idx = index_set(n, d);
  const DenseMatrix v = DenseMatrix::Random(idx.size(), 10);
  const ComplexVector w = ComplexVector::Unit(d, 0);
  for (auto _ : state) benchmark::DoNotOptimize(streamed_shift_product(grid, idx, w, v, &pool));
}

void BM_MaterialisedShiftProduct(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const int n = static_cast<int>(state.range(1));
  const WorkerPool pool(static_cast<int>(state.range(2)));
  const SampleGrid grid = sample_grid(standard_test_family(d, 5), n, {});
  const IndexSet idx = index_set(n, d);
  const DenseMatrix v = DenseMatrix::Random(idx.size(), 10);
  for (auto _ : state) {
    const DenseMatrix t1 = build_T_ell(grid, idx, 1, &pool);
    benchmark::DoNotOptimize(panel_multiply(t1, v, &pool));
  }
}

void assembly_cases(benchmark::internal::Benchmark* b) {
  b->ArgNames({"d", "n", "workers"});
  b->Args({2, 20, 1});
  b->Args({3, 8, 1});
  b->Args({3, 10, 1});
  b->Args({3, 10, 4});
  b->Unit(benchmark::kMillisecond);
}

}  // namespace

BENCHMARK(BM_BuildT)->Apply(assembly_cases);
BENCHMARK(BM_StreamedShiftProduct)->Apply(assembly_cases);
BENCHMARK(BM_MaterialisedShiftProduct)->Apply(assembly_cases);
