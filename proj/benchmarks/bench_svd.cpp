#include <benchmark/benchmark.h>

#include <prony/matrix_assembly.hpp>
#include <prony/reduced_svd.hpp>

namespace {

using namespace prony;

// args: d, m, n
DenseMatrix family_matrix(const benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const int m = static_cast<int>(state.range(1));
  const int n = static_cast<int>(state.range(2));
  return build_T(sample_grid(standard_test_family(d, m), n, {}), index_set(n, d));
}

void BM_DenseSvd(benchmark::State& state) {
  const DenseMatrix t = family_matrix(state);
  const RankCriterion crit = RankCriterion::machine(t.rows());
  for (auto _ : state) benchmark::DoNotOptimize(dense_svd(t, crit));
  state.counters["N"] = static_cast<double>(t.rows());
}

void BM_LanczosSvd(benchmark::State& state) {
  const DenseMatrix t = family_matrix(state);
  const RankCriterion crit = RankCriterion::machine(t.rows());
  LanczosOptions options;
  options.expected_rank = static_cast<int>(state.range(1));
  const ComplexVector p1 = random_complex_vector(t.cols(), 1);
  for (auto _ : state) benchmark::DoNotOptimize(lanczos_svd(t, p1, crit, options));
  state.counters["N"] = static_cast<double>(t.rows());
}

void BM_PowerSvd(benchmark::State& state) {
  const DenseMatrix t = family_matrix(state);
  const RankCriterion crit = RankCriterion::machine(t.rows());
  const int r0 = 2 * static_cast<int>(state.range(1));
  const DenseMatrix u0 = random_orthonormal(t.rows(), r0, 2);
  const DenseMatrix v0 = random_orthonormal(t.cols(), r0, 3);
  for (auto _ : state) benchmark::DoNotOptimize(power_svd(t, r0, u0, v0, crit));
  state.counters["N"] = static_cast<double>(t.rows());
}

void family_cases(benchmark::internal::Benchmark* b) {
  b->ArgNames({"d", "m", "n"});
  b->Args({2, 5, 20});
  b->Args({3, 5, 8});
  b->Args({3, 10, 10});
  b->Unit(benchmark::kMillisecond);
}

}  // namespace

BENCHMARK(BM_DenseSvd)->Apply(family_cases);
BENCHMARK(BM_LanczosSvd)->Apply(family_cases);
BENCHMARK(BM_PowerSvd)->Apply(family_cases);
BENCHMARK_MAIN();
