#include <benchmark/benchmark.h>

#include "bench_common.hpp"
#include "pnm/lindblad.hpp"

namespace {

void BM_Propagate(benchmark::State& state) {
  const auto integrator = state.range(1) == 0 ? pnm::Integrator::kExponential : pnm::Integrator::kDormandPrince;
  const pnm::SingleModeConfig c = pnm::bench::resonant_mode(static_cast<int>(state.range(0)));
  const pnm::LindbladModel m = pnm::build_lindblad(c.siv, c.mode, c.gamma_siv, c.n_delta);
  const pnm::DensityMatrix rho0(
      pnm::tensor(pnm::DensityMatrix::basis(4, 0).op(), pnm::FockSpace(c.mode.n_max).projector(1)));
  const std::vector<double> grid = pnm::uniform_grid(0.0, 30.0 / c.mode.g_abs(), 1000);
  pnm::PropagateOptions o;
  o.integrator = integrator;
  for (auto _ : state) benchmark::DoNotOptimize(pnm::propagate(m, rho0, grid, o));
}
BENCHMARK(BM_Propagate)->Args({4, 0})->Args({10, 0})->Args({4, 1})->Unit(benchmark::kMillisecond);

void BM_SingleModeNd(benchmark::State& state) {
  pnm::SingleModeConfig c = pnm::bench::resonant_mode(static_cast<int>(state.range(0)));
  c.window = 30.0;
  c.samples = 1000;
  for (auto _ : state) benchmark::DoNotOptimize(pnm::single_mode_nd(c).nd.value);
}
BENCHMARK(BM_SingleModeNd)->Arg(4)->Arg(10)->Unit(benchmark::kMillisecond);

}  // namespace
