#include <benchmark/benchmark.h>

#include "chemostokes/initial_data.hpp"
#include "chemostokes/solver.hpp"
#include "chemostokes/studies.hpp"

using namespace chemostokes;

namespace {

void BM_AdvanceSmoke(benchmark::State& state) {
  RunConfig cfg = smoke_config();
  const int n = static_cast<int>(state.range(0));
  cfg.grid = GridSpec(2, {n, n, 1}, {4, 4, 1});
  Solver solver(cfg.grid, cfg.model, cfg.run.solver);
  SolverState s = make_initial_state(cfg);
  for (auto _ : state) s = solver.advance(s);
  state.counters["t"] = s.t;
}
BENCHMARK(BM_AdvanceSmoke)->Arg(32)->Arg(48)->Arg(96);

}  // namespace

BENCHMARK_MAIN();
