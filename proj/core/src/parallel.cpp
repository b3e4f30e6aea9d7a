#include "prony/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <condition_variable>
#include <cstdlib>
#include <deque>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace prony {

namespace {

struct Job {
  std::size_t count = 0;
  const std::function<void(std::size_t)>* body = nullptr;
  std::atomic<std::size_t> next{0};
  std::size_t done = 0;  // guarded by mutex
  int helpers = 0;       // pool threads inside work(); guarded by the arena mutex
  std::mutex mutex;
  std::condition_variable finished;
  std::exception_ptr error;

  // Claims and runs indices until none are left.
  void work() {
    for (;;) {
      const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= count) return;
      std::exception_ptr caught;
      try {
        (*body)(i);
      } catch (...) {
        caught = std::current_exception();
      }
      std::lock_guard lock(mutex);
      if (caught && !error) error = caught;
      if (++done == count) finished.notify_all();
    }
  }
};

}  // namespace

struct WorkerPool::Arena {
  std::mutex mutex;
  std::condition_variable wake;
  std::condition_variable idle;
  std::deque<Job*> queue;
  bool stopping = false;
  std::vector<std::jthread> threads;

  explicit Arena(int helpers) {
    threads.reserve(static_cast<std::size_t>(helpers));
    for (int i = 0; i < helpers; ++i) threads.emplace_back([this] { loop(); });
  }

  ~Arena() {
    {
      std::lock_guard lock(mutex);
      stopping = true;
    }
    wake.notify_all();
  }

  void loop() {
    for (;;) {
      Job* job = nullptr;
      {
        std::unique_lock lock(mutex);
        wake.wait(lock, [&] { return stopping || !queue.empty(); });
        if (stopping && queue.empty()) return;
        job = queue.front();
        // Leave the job queued while indices remain so other helpers join in.
        if (job->next.load(std::memory_order_relaxed) >= job->count) {
          queue.pop_front();
          continue;
        }
        ++job->helpers;
      }
      job->work();
      std::lock_guard lock(mutex);
      if (!queue.empty() && queue.front() == job) queue.pop_front();
      --job->helpers;
      idle.notify_all();
    }
  }

  void submit(Job& job) {
    {
      std::lock_guard lock(mutex);
      queue.push_back(&job);
    }
    wake.notify_all();
  }

  // The job lives on the caller's stack; no helper may touch it afterwards.
  void retire(Job& job) {
    std::unique_lock lock(mutex);
    std::erase(queue, &job);
    idle.wait(lock, [&] { return job.helpers == 0; });
  }
};

WorkerPool::WorkerPool(int workers) : workers_(std::max(1, workers)) {
  if (workers_ > 1) arena_ = std::make_unique<Arena>(workers_ - 1);
}

WorkerPool::~WorkerPool() = default;
WorkerPool::WorkerPool(WorkerPool&&) noexcept = default;
WorkerPool& WorkerPool::operator=(WorkerPool&&) noexcept = default;

void WorkerPool::parallel_for(std::size_t count,
                              const std::function<void(std::size_t)>& body) const {
  if (count == 0) return;
  if (!arena_ || count == 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  Job job;
  job.count = count;
  job.body = &body;
  arena_->submit(job);
  job.work();
  {
    std::unique_lock lock(job.mutex);
    job.finished.wait(lock, [&] { return job.done == job.count; });
  }
  arena_->retire(job);
  if (job.error) std::rethrow_exception(job.error);
}

void WorkerPool::run_pair(const std::function<void()>& first,
                          const std::function<void()>& second) const {
  if (workers_ <= 1) {
    first();
    second();
    return;
  }
  std::exception_ptr second_error;
  std::jthread lane([&] {
    try {
      second();
    } catch (...) {
      second_error = std::current_exception();
    }
  });
  std::exception_ptr first_error;
  try {
    first();
  } catch (...) {
    first_error = std::current_exception();
  }
  lane.join();
  if (first_error) std::rethrow_exception(first_error);
  if (second_error) std::rethrow_exception(second_error);
}

DenseMatrix panel_multiply(const DenseMatrix& a, const DenseMatrix& x, const WorkerPool* pool) {
  DenseMatrix out(a.rows(), x.cols());
  const Index panels = (a.rows() + kPanelSize - 1) / kPanelSize;
  auto body = [&](std::size_t p) {
    const Index r0 = static_cast<Index>(p) * kPanelSize;
    const Index h = std::min(kPanelSize, a.rows() - r0);
    out.middleRows(r0, h).noalias() = a.middleRows(r0, h) * x;
  };
  if (pool) {
    pool->parallel_for(static_cast<std::size_t>(panels), body);
  } else {
    for (Index p = 0; p < panels; ++p) body(static_cast<std::size_t>(p));
  }
  return out;
}

DenseMatrix panel_adjoint_multiply(const DenseMatrix& a, const DenseMatrix& x,
                                   const WorkerPool* pool) {
  DenseMatrix out(a.cols(), x.cols());
  const Index panels = (a.cols() + kPanelSize - 1) / kPanelSize;
  auto body = [&](std::size_t p) {
    const Index c0 = static_cast<Index>(p) * kPanelSize;
    const Index w = std::min(kPanelSize, a.cols() - c0);
    out.middleRows(c0, w).noalias() = a.middleCols(c0, w).adjoint() * x;
  };
  if (pool) {
    pool->parallel_for(static_cast<std::size_t>(panels), body);
  } else {
    for (Index p = 0; p < panels; ++p) body(static_cast<std::size_t>(p));
  }
  return out;
}

int default_worker_count() {
  if (const char* env = std::getenv("PRONY_WORKERS")) {
    try {
      const int value = std::stoi(env);
      if (value >= 1) return value;
    } catch (const std::exception&) {
    }
  }
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

}  // namespace prony
