#include <benchmark/benchmark.h>

#include "pnm/bath.hpp"
#include "pnm/units.hpp"

namespace {

pnm::BathParams bath() {
  pnm::BathParams b;
  b.center = pnm::units::ghz(45.0);
  b.width = 0.1 * b.center;
  b.j0 = 4.55 / b.center;
  b.temperature = 0.5;
  return b;
}

void BM_RateIntegrals(benchmark::State& state) {
  const pnm::BathParams b = bath();
  const double t = static_cast<double>(state.range(0)) / b.center;
  for (auto _ : state) benchmark::DoNotOptimize(pnm::rate_integrals(b.center, t, b));
}
BENCHMARK(BM_RateIntegrals)->Arg(1)->Arg(20)->Arg(60)->Unit(benchmark::kMicrosecond);

void BM_RateTable(benchmark::State& state) {
  const pnm::BathParams b = bath();
  const std::vector<double> omegas{-b.center, 0.0, b.center};
  for (auto _ : state) {
    benchmark::DoNotOptimize(pnm::RateTable(b, omegas, 60.0 / b.center, static_cast<std::size_t>(state.range(0)), 1));
  }
}
BENCHMARK(BM_RateTable)->Arg(201)->Arg(1201)->Unit(benchmark::kMillisecond);

}  // namespace
