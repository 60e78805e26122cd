#include "swefinn/finn.hpp"
#include "swefinn/scenario.hpp"
#include "swefinn/solver.hpp"
#include "swefinn/training.hpp"

#include <benchmark/benchmark.h>

using namespace swefinn;

namespace {

SimConfig grid_of(std::size_t n, std::size_t steps) {
  SimConfig cfg;
  cfg.grid.nx = n;
  cfg.grid.ny = n;
  cfg.grid.side_length_m = 31250.0 * static_cast<double>(n);
  cfg.steps = steps;
  return cfg;
}

Sequence sample(std::size_t n, std::size_t steps) {
  const SimConfig cfg = grid_of(n, steps);
  const double mid = cfg.grid.side_length_m / 2.0;
  return simulate_sequence(Field2D(n, n, 68.0), TopoSpec{}, {mid, mid, 5.0e4}, cfg);
}

void BM_ReferenceRollout(benchmark::State &state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const SimConfig cfg = grid_of(n, 100);
  const double mid = cfg.grid.side_length_m / 2.0;
  const Field2D eta0 = gaussian_ic(cfg.grid, mid, mid, 5.0e4);
  const Field2D H(n, n, 100.0);
  for (auto _ : state) benchmark::DoNotOptimize(reference_rollout(eta0, H, cfg));
  state.SetItemsProcessed(state.iterations() * 100);
}
BENCHMARK(BM_ReferenceRollout)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_FinnForward(benchmark::State &state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Sequence s = sample(n, 20);
  const FinnParams p = FinnParams::init(13, 0);
  for (auto _ : state) benchmark::DoNotOptimize(finn_sequence_mse(p, s.eta, s.H, s.grid, s.dt_s));
  state.SetItemsProcessed(state.iterations() * 20);
}
BENCHMARK(BM_FinnForward)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_FinnParamGradient(benchmark::State &state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Sequence s = sample(n, 20);
  const FinnParams p = FinnParams::init(13, 0);
  for (auto _ : state) benchmark::DoNotOptimize(sequence_gradient(p, s, s.H, 0, true, false));
  state.SetItemsProcessed(state.iterations() * 20);
}
BENCHMARK(BM_FinnParamGradient)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_FinnDepthGradient(benchmark::State &state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Sequence s = sample(n, 20);
  const FinnParams p = FinnParams::init(13, 0);
  const Field2D flat(n, n, 65.0);
  for (auto _ : state) benchmark::DoNotOptimize(sequence_gradient(p, s, flat, 0, false, true));
  state.SetItemsProcessed(state.iterations() * 20);
}
BENCHMARK(BM_FinnDepthGradient)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
