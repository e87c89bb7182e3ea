#include <benchmark/benchmark.h>

#include <numbers>

#include "bench_common.hpp"
#include "pnm/measures.hpp"

namespace {

void BM_BlpFunctional(benchmark::State& state) {
  const pnm::SingleModeConfig c = pnm::bench::resonant_mode(4);
  const pnm::DynamicalMapTable maps =
      pnm::single_mode_map_factory(c)(30.0, static_cast<std::size_t>(state.range(0)));
  constexpr double pi = std::numbers::pi;
  const pnm::BlpPoint x{pi / 2, pi, 3 * pi / 2, 0, pi / 2, pi, pi / 2, 0};
  for (auto _ : state) benchmark::DoNotOptimize(pnm::blp_functional(maps, x));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_BlpFunctional)->Arg(300)->Arg(1000)->Arg(3000);

void BM_MapTable(benchmark::State& state) {
  const pnm::SingleModeConfig c = pnm::bench::resonant_mode(static_cast<int>(state.range(0)));
  const pnm::MapFactory f = pnm::single_mode_map_factory(c);
  for (auto _ : state) benchmark::DoNotOptimize(f(30.0, 600));
}
BENCHMARK(BM_MapTable)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace
