#include <atomic>
#include <stdexcept>
#include <thread>
#include <vector>

#include <gtest/gtest.h>

#include <prony/parallel.hpp>

namespace prony {
namespace {

TEST(WorkerPool, VisitsEveryIndexOnce) {
  for (int workers : {1, 3, 8}) {
    const WorkerPool pool(workers);
    std::vector<std::atomic<int>> hits(1000);
    pool.parallel_for(hits.size(), [&](std::size_t i) { hits[i].fetch_add(1); });
    for (const auto& h : hits) EXPECT_EQ(h.load(), 1);
  }
}

TEST(WorkerPool, RethrowsTaskException) {
  const WorkerPool pool(4);
  EXPECT_THROW(pool.parallel_for(64, [](std::size_t i) {
    if (i == 17) throw std::runtime_error("boom");
  }),
               std::runtime_error);
  // The pool stays usable afterwards.
  std::atomic<int> count{0};
  pool.parallel_for(10, [&](std::size_t) { ++count; });
  EXPECT_EQ(count.load(), 10);
}

TEST(WorkerPool, ConcurrentCallersShareThePool) {
  const WorkerPool pool(4);
  std::atomic<long> a{0};
  std::atomic<long> b{0};
  std::thread other([&] {
    for (int rep = 0; rep < 50; ++rep) pool.parallel_for(100, [&](std::size_t i) { b += static_cast<long>(i); });
  });
  for (int rep = 0; rep < 50; ++rep) pool.parallel_for(100, [&](std::size_t i) { a += static_cast<long>(i); });
  other.join();
  EXPECT_EQ(a.load(), 50L * 4950);
  EXPECT_EQ(b.load(), 50L * 4950);
}

TEST(WorkerPool, RunPairRunsBothAndPropagates) {
  const WorkerPool pool(2);
  int x = 0;
  int y = 0;
  pool.run_pair([&] { x = 1; }, [&] { y = 2; });
  EXPECT_EQ(x + y, 3);
  EXPECT_THROW(pool.run_pair([] {}, [] { throw std::logic_error("lane"); }), std::logic_error);
}

TEST(PanelProducts, BitIdenticalAcrossWorkerCounts) {
  const DenseMatrix a = DenseMatrix::Random(700, 300);
  const DenseMatrix x = DenseMatrix::Random(300, 7);
  const DenseMatrix y = DenseMatrix::Random(700, 5);
  const DenseMatrix ref = panel_multiply(a, x, nullptr);
  const DenseMatrix ref_adj = panel_adjoint_multiply(a, y, nullptr);
  EXPECT_LE((ref - a * x).norm(), 1e-12 * ref.norm());
  EXPECT_LE((ref_adj - a.adjoint() * y).norm(), 1e-12 * ref_adj.norm());
  for (int workers : {1, 4, 8}) {
    const WorkerPool pool(workers);
    EXPECT_TRUE(panel_multiply(a, x, &pool) == ref);
    EXPECT_TRUE(panel_adjoint_multiply(a, y, &pool) == ref_adj);
  }
}

TEST(DefaultWorkerCount, ReadsEnvironment) {
  ::setenv("PRONY_WORKERS", "5", 1);
  EXPECT_EQ(default_worker_count(), 5);
  ::setenv("PRONY_WORKERS", "nonsense", 1);
  EXPECT_GE(default_worker_count(), 1);
  ::unsetenv("PRONY_WORKERS");
  EXPECT_GE(default_worker_count(), 1);
}

}  // namespace
}  // namespace prony
