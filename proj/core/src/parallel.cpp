#include "chemostokes/parallel.hpp"

#include <algorithm>
#include <condition_variable>
#include <cstdint>
#include <exception>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <vector>

namespace chemostokes::parallel {
namespace {

// Workers sleep on a condition variable between jobs; the caller takes part
// in every job. Tasks are claimed under the mutex, so a late-waking worker
// can only ever pick up tasks of the job that is currently posted.
class ThreadPool {
 public:
  explicit ThreadPool(int workers) {
    threads_.reserve(static_cast<std::size_t>(workers));
    for (int i = 0; i < workers; ++i) threads_.emplace_back([this] { worker_loop(); });
  }

  ~ThreadPool() {
    {
      std::lock_guard lk(mu_);
      stop_ = true;
    }
    cv_.notify_all();
    for (auto& t : threads_) t.join();
  }

  ThreadPool(const ThreadPool&) = delete;
  ThreadPool& operator=(const ThreadPool&) = delete;

  void run(int n_tasks, const std::function<void(int)>& task) {
    std::unique_lock lk(mu_);
    task_ = &task;
    n_tasks_ = n_tasks;
    next_ = 0;
    done_ = 0;
    error_ = nullptr;
    ++generation_;
    lk.unlock();
    cv_.notify_all();
    lk.lock();
    drain(lk);
    done_cv_.wait(lk, [&] { return done_ == n_tasks_; });
    task_ = nullptr;
    if (error_) std::rethrow_exception(error_);
  }

 private:
  void drain(std::unique_lock<std::mutex>& lk) {
    while (next_ < n_tasks_) {
      const int i = next_++;
      const auto* task = task_;
      lk.unlock();
      std::exception_ptr err;
      try {
        (*task)(i);
      } catch (...) {
        err = std::current_exception();
      }
      lk.lock();
      if (err && !error_) error_ = err;
      if (++done_ == n_tasks_) done_cv_.notify_all();
    }
  }

  void worker_loop() {
    std::unique_lock lk(mu_);
    std::uint64_t seen = 0;
    for (;;) {
      cv_.wait(lk, [&] { return stop_ || generation_ != seen; });
      if (stop_) return;
      seen = generation_;
      drain(lk);
    }
  }

  std::vector<std::thread> threads_;
  std::mutex mu_;
  std::condition_variable cv_;
  std::condition_variable done_cv_;
  const std::function<void(int)>* task_ = nullptr;
  int n_tasks_ = 0;
  int next_ = 0;
  int done_ = 0;
  std::uint64_t generation_ = 0;
  bool stop_ = false;
  std::exception_ptr error_;
};

int g_threads = 1;
std::size_t g_grain = 1024;
std::unique_ptr<ThreadPool> g_pool;

double pairwise(const double* v, std::size_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += v[i];
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise(v, half) + pairwise(v + half, n - half);
}

}  // namespace

void set_thread_count(int n) {
  if (n < 1 || n > 256) throw std::invalid_argument("thread count must be in [1, 256]");
  if (n == g_threads) return;
  g_pool.reset();
  g_threads = n;
  if (n > 1) g_pool = std::make_unique<ThreadPool>(n - 1);
}

int thread_count() { return g_threads; }

void set_grain(std::size_t grain) { g_grain = std::max<std::size_t>(grain, 1); }

std::size_t grain() { return g_grain; }

void for_range(std::size_t begin, std::size_t end,
               const std::function<void(std::size_t, std::size_t)>& body,
               std::size_t grain_override) {
  if (end <= begin) return;
  const std::size_t n = end - begin;
  const std::size_t g = grain_override > 0 ? grain_override : g_grain;
  const std::size_t max_chunks = (n + g - 1) / g;
  const int chunks = static_cast<int>(std::min<std::size_t>(g_threads, max_chunks));
  if (chunks <= 1 || !g_pool) {
    body(begin, end);
    return;
  }
  const std::size_t step = (n + chunks - 1) / chunks;
  g_pool->run(chunks, [&](int c) {
    const std::size_t b = begin + static_cast<std::size_t>(c) * step;
    const std::size_t e = std::min(end, b + step);
    if (b < e) body(b, e);
  });
}

double pairwise_sum(std::span<const double> values) {
  return pairwise(values.data(), values.size());
}

double tree_sum(std::size_t n, const std::function<double(std::size_t)>& term) {
  if (n == 0) return 0.0;
  const std::size_t blocks = (n + kReductionBlock - 1) / kReductionBlock;
  std::vector<double> partial(blocks, 0.0);
  for_range(0, blocks, [&](std::size_t b0, std::size_t b1) {
    std::vector<double> leaf(kReductionBlock);
    for (std::size_t b = b0; b < b1; ++b) {
      const std::size_t lo = b * kReductionBlock;
      const std::size_t hi = std::min(n, lo + kReductionBlock);
      for (std::size_t i = lo; i < hi; ++i) leaf[i - lo] = term(i);
      partial[b] = pairwise(leaf.data(), hi - lo);
    }
  }, std::max<std::size_t>(1, g_grain / kReductionBlock));
  return pairwise(partial.data(), partial.size());
}

double tree_sum(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n == 0) return 0.0;
  const std::size_t blocks = (n + kReductionBlock - 1) / kReductionBlock;
  std::vector<double> partial(blocks, 0.0);
  for_range(0, blocks, [&](std::size_t b0, std::size_t b1) {
    for (std::size_t b = b0; b < b1; ++b) {
      const std::size_t lo = b * kReductionBlock;
      partial[b] = pairwise(values.data() + lo, std::min(n, lo + kReductionBlock) - lo);
    }
  }, std::max<std::size_t>(1, g_grain / kReductionBlock));
  return pairwise(partial.data(), partial.size());
}

double tree_dot(std::span<const double> a, std::span<const double> b, double scale) {
  const std::size_t n = a.size();
  if (b.size() != n) throw std::invalid_argument("tree_dot: size mismatch");
  if (n == 0) return 0.0;
  const std::size_t blocks = (n + kReductionBlock - 1) / kReductionBlock;
  std::vector<double> partial(blocks, 0.0);
  for_range(0, blocks, [&](std::size_t b0, std::size_t b1) {
    double leaf[kReductionBlock];
    for (std::size_t blk = b0; blk < b1; ++blk) {
      const std::size_t lo = blk * kReductionBlock;
      const std::size_t hi = std::min(n, lo + kReductionBlock);
      for (std::size_t i = lo; i < hi; ++i) leaf[i - lo] = a[i] * b[i] * scale;
      partial[blk] = pairwise(leaf, hi - lo);
    }
  }, std::max<std::size_t>(1, g_grain / kReductionBlock));
  return pairwise(partial.data(), partial.size());
}

}  // namespace chemostokes::parallel
