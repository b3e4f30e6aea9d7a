#pragma once

#include <cstddef>
#include <functional>
#include <memory>

#include "prony/types.hpp"

namespace prony {

/// Fixed-size pool of workers for data-parallel loops.
///
/// Work is always split into tasks whose boundaries do not depend on the
/// worker count, so results are bit-identical for any pool size.
class WorkerPool {
 public:
  explicit WorkerPool(int workers = 1);
  ~WorkerPool();
  WorkerPool(WorkerPool&&) noexcept;
  WorkerPool& operator=(WorkerPool&&) noexcept;
  WorkerPool(const WorkerPool&) = delete;
  WorkerPool& operator=(const WorkerPool&) = delete;

  int workers() const noexcept { return workers_; }

  /// Runs body(i) for i in [0, count). Blocks until all calls returned.
  void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body) const;

  /// Runs both callables, concurrently when the pool has more than one worker.
  void run_pair(const std::function<void()>& first, const std::function<void()>& second) const;

 private:
  struct Arena;
  int workers_;
  std::unique_ptr<Arena> arena_;
};

/// Panel height used by every parallel product. Independent of worker count.
inline constexpr Index kPanelSize = 256;

/// A * X computed over fixed row panels of A.
DenseMatrix panel_multiply(const DenseMatrix& a, const DenseMatrix& x, const WorkerPool* pool);

/// A^* * X computed over fixed column panels of A.
DenseMatrix panel_adjoint_multiply(const DenseMatrix& a, const DenseMatrix& x,
                                   const WorkerPool* pool);

/// Number of workers from PRONY_WORKERS, falling back to hardware concurrency.
int default_worker_count();

}  // namespace prony
