// Parallel kernels against their serial references.

#include <benchmark/benchmark.h>

#include "cgle/bordered.hpp"
#include "cgle/dynamics.hpp"
#include "cgle/spectral.hpp"
#include "reference/reference.hpp"

using namespace cgle;

namespace {

const Parameters kP{16.0, -7.0, 5.0};

void BM_CubicConvFft(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const SpectralField a = reference::random_field(Grid(n, n), 1);
  for (auto _ : state) benchmark::DoNotOptimize(cubic_conv(a, a, a));
}

void BM_CubicConvDirect(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const SpectralField a = reference::random_field(Grid(n, n), 1);
  for (auto _ : state) benchmark::DoNotOptimize(reference::direct_cubic_conv(a, a, a));
}

void BM_BorderedStep(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const StatePoint s = reference::add_noise(plane_wave(1, kP, 0.05, 1.0, Grid(n, n)), 1e-3, 2);
  const RealVector b = -residual(s);
  BorderedConfig cfg;
  cfg.concurrent = state.range(1) != 0;
  for (auto _ : state) benchmark::DoNotOptimize(bordered_newton_step(s, b, cfg));
}

void BM_Monodromy(benchmark::State& state) {
  const StatePoint s = plane_wave(0, kP, 0.05, 0.0, Grid(32, 32));
  MonodromyConfig cfg;
  cfg.steps = 512;
  cfg.parallel = state.range(0) != 0;
  for (auto _ : state) benchmark::DoNotOptimize(relative_monodromy(s, cfg));
}

}  // namespace

BENCHMARK(BM_CubicConvFft)->Arg(8)->Arg(16)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_CubicConvDirect)->Arg(8)->Arg(16)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_BorderedStep)->ArgsProduct({{16, 32}, {0, 1}})->ArgNames({"n", "concurrent"})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Monodromy)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
