#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace chemostokes::parallel {

/// Number of threads used by field sweeps. 1 means everything runs inline.
void set_thread_count(int n);
int thread_count();

/// Ranges shorter than the grain are never split.
void set_grain(std::size_t grain);
std::size_t grain();

/// Leaf size of the fixed-shape summation tree. Independent of thread count.
inline constexpr std::size_t kReductionBlock = 1024;

/// Calls body(begin, end) on disjoint contiguous sub-ranges covering [begin, end).
/// Sub-ranges may run concurrently; body must only write to its own indices.
/// A nonzero grain_override replaces the global grain for this call.
void for_range(std::size_t begin, std::size_t end,
               const std::function<void(std::size_t, std::size_t)>& body,
               std::size_t grain_override = 0);

template <class F>
void for_each(std::size_t n, F&& f) {
  for_range(0, n, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) f(i);
  });
}

/// Pairwise sum of a contiguous array, recursing down to 8-element leaves.
double pairwise_sum(std::span<const double> values);

/// Deterministic sum of term(0..n-1): blocks of kReductionBlock terms are
/// pairwise-summed (possibly in parallel), then the block sums are combined
/// with the same pairwise tree. The result does not depend on thread count.
double tree_sum(std::size_t n, const std::function<double(std::size_t)>& term);

/// Same tree over a contiguous array.
double tree_sum(std::span<const double> values);

/// Same tree over the products a[i] * b[i] * scale.
double tree_dot(std::span<const double> a, std::span<const double> b, double scale = 1.0);

/// RAII override of the thread count, restored on scope exit.
class ScopedThreads {
 public:
  explicit ScopedThreads(int n) : saved_(thread_count()) { set_thread_count(n); }
  ~ScopedThreads() { set_thread_count(saved_); }
  ScopedThreads(const ScopedThreads&) = delete;
  ScopedThreads& operator=(const ScopedThreads&) = delete;

 private:
  int saved_;
};

class ScopedGrain {
 public:
  explicit ScopedGrain(std::size_t g) : saved_(grain()) { set_grain(g); }
  ~ScopedGrain() { set_grain(saved_); }
  ScopedGrain(const ScopedGrain&) = delete;
  ScopedGrain& operator=(const ScopedGrain&) = delete;

 private:
  std::size_t saved_;
};

}  // namespace chemostokes::parallel
