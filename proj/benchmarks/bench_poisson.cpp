#include <benchmark/benchmark.h>

#include <cmath>

#include "chemostokes/poisson.hpp"

using namespace chemostokes;

namespace {

void BM_PoissonSolve(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto pc = state.range(1) ? NeumannPoisson::Preconditioner::Spectral : NeumannPoisson::Preconditioner::None;
  const GridSpec g(2, {n, n, 1}, {1, 1, 1});
  NeumannPoisson solver(g, pc);
  ScalarField b(g);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) b.at(i, j) = std::cos(3.0 * i / n) * std::sin(5.0 * j / n);
  int iters = 0;
  for (auto _ : state) {
    ScalarField x(g);
    iters = solver.solve(b, x, 1e-10, 2000).iterations;
    benchmark::DoNotOptimize(x);
  }
  state.counters["cg_iterations"] = iters;
}
BENCHMARK(BM_PoissonSolve)->Args({64, 1})->Args({128, 1})->Args({64, 0})->Args({128, 0});

}  // namespace
