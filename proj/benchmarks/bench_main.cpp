#include <benchmark/benchmark.h>

#include <filesystem>

#include "stratrt/atmosphere.hpp"
#include "stratrt/grey.hpp"
#include "stratrt/kernels.hpp"
#include "stratrt/specfun.hpp"
#include "stratrt/spectral.hpp"

using namespace stratrt;

namespace {

void BM_Expint(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  double x = 1e-3;
  for (auto _ : state) {
    benchmark::DoNotOptimize(expint(n, x));
    x = x < 40.0 ? x * 1.01 : 1e-3;
  }
}
BENCHMARK(BM_Expint)->Arg(1)->Arg(3)->Arg(5);

void BM_KernelAssembly(benchmark::State& state) {
  const Grid1D g = Grid1D::uniform(10.0, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(build_kernel(g, 0.5, 1, 0.1));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_KernelAssembly)->RangeMultiplier(2)->Range(50, 400)->Complexity();

void BM_KernelFamily(benchmark::State& state) {
  const Grid1D g = Grid1D::uniform(1.0, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(KernelFamily(g, 1.2, 0.1));
}
BENCHMARK(BM_KernelFamily)->Arg(60)->Arg(200);

void BM_GreyIterate(benchmark::State& state) {
  GreyConfig c;
  c.outer_iters = 30;
  const Grid1D g = grey_grid(c, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(grey_iterate(c, g));
}
BENCHMARK(BM_GreyIterate)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);

Scenario bench_scenario() {
  Scenario s;
  s.n_depth = 20;
  s.n_freq = 100;
  s.max_iters = 10;
  return s;
}

Spectrum bench_spectrum(const Scenario& s) {
  const auto path = std::filesystem::path(STRATRT_DATA_DIR) / "transmittance_schematic.csv";
  return build_spectrum(load_transmittance(path), s);
}

void BM_MomentsUpdate(benchmark::State& state) {
  const Scenario s = bench_scenario();
  const Spectrum sp = bench_spectrum(s);
  const SpectralProblem p(sp, scenario_grid(s), scenario_sources(s, sp), s.ground_albedo);
  const auto r = solve_spectral(p, SolverControls{1e-12, 3, 1});
  for (auto _ : state) benchmark::DoNotOptimize(moments_update(p, r.state, r.T));
}
BENCHMARK(BM_MomentsUpdate)->Unit(benchmark::kMillisecond);

void BM_Atmosphere(benchmark::State& state) {
  const Scenario s = bench_scenario();
  const Spectrum sp = bench_spectrum(s);
  for (auto _ : state) benchmark::DoNotOptimize(run_scenario(s, sp));
}
BENCHMARK(BM_Atmosphere)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
