#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>

#include "bench_common.hpp"
#include "pnm/optimize.hpp"

namespace {

void BM_DeRastrigin(benchmark::State& state) {
  pnm::OptProblem p;
  p.objective = [](const std::vector<double>& x) {
    double s = 10.0 * static_cast<double>(x.size());
    for (double v : x) s += v * v - 10.0 * std::cos(2.0 * std::numbers::pi * v);
    return s;
  };
  p.lower.assign(8, -5.12);
  p.upper.assign(8, 5.12);
  p.seed = 1;
  pnm::DeOptions o;
  o.pop_size = 40;
  o.max_gen = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(pnm::differential_evolution(p, o).best_value);
}
BENCHMARK(BM_DeRastrigin)->Arg(25)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_DeBlp(benchmark::State& state) {
  const pnm::SingleModeConfig c = pnm::bench::resonant_mode(4);
  const pnm::DynamicalMapTable maps = pnm::single_mode_map_factory(c)(30.0, 300);
  pnm::DeOptions o;
  o.pop_size = 40;
  o.max_gen = 10;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        pnm::differential_evolution(pnm::blp_problem(maps, 3, 0, static_cast<int>(state.range(0))), o).best_value);
  }
}
BENCHMARK(BM_DeBlp)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

}  // namespace
