#include <benchmark/benchmark.h>

#include <cmath>
#include <cstdint>

#include "chemostokes/grid.hpp"

using namespace chemostokes;

namespace {

ScalarField wavy(const GridSpec& g) {
  ScalarField f(g);
  for (std::size_t i = 0; i < f.values().size(); ++i) f.values()[i] = std::sin(0.01 * static_cast<double>(i));
  return f;
}

void BM_Laplacian2D(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const GridSpec g(2, {n, n, 1}, {1, 1, 1});
  const ScalarField f = wavy(g);
  for (auto _ : state) benchmark::DoNotOptimize(laplacian(f));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(g.cell_count()));
}
BENCHMARK(BM_Laplacian2D)->Arg(64)->Arg(128)->Arg(256);

void BM_GradientDivergence3D(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const GridSpec g(3, {n, n, n}, {1, 1, 1});
  const ScalarField f = wavy(g);
  for (auto _ : state) benchmark::DoNotOptimize(divergence(gradient(f)));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(g.cell_count()));
}
BENCHMARK(BM_GradientDivergence3D)->Arg(16)->Arg(32);

void BM_Integrate(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const GridSpec g(2, {n, n, 1}, {1, 1, 1});
  const ScalarField f = wavy(g);
  for (auto _ : state) benchmark::DoNotOptimize(integrate(f));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(g.cell_count()));
}
BENCHMARK(BM_Integrate)->Arg(128)->Arg(512);

}  // namespace
