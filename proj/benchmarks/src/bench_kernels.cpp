#include <benchmark/benchmark.h>

#include <cstdint>

#include "smre/admm.hpp"
#include "smre/constraint_system.hpp"
#include "smre/operators.hpp"
#include "smre/projections.hpp"
#include "smre/prox.hpp"
#include "smre/random.hpp"
#include "smre/windows.hpp"

namespace {

using namespace smre;

SignalArray noise(const Grid& g, double sigma, std::uint64_t seed) {
  SignalArray x(g);
  NormalStream s(seed, 0);
  for (double& v : x.values()) v = sigma * s();
  return x;
}

ConstraintSystem band_system(const Grid& g, int max_side, double q) {
  const WindowSystem w = enumerate(g, 1, max_side);
  return ConstraintSystem::windowed(w, Transform::Identity, q, indicator_coefficients(w));
}

void BM_Enumerate2d(benchmark::State& state) {
  const Grid g(2, static_cast<int>(state.range(0)));
  for (auto _ : state) {
    const WindowSystem w = enumerate(g, 1, 25);
    benchmark::DoNotOptimize(w.size());
  }
}
BENCHMARK(BM_Enumerate2d)->Arg(128)->Arg(512);

void BM_MrStatistic(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const Grid g(d, static_cast<int>(state.range(1)));
  const ConstraintSystem sys = band_system(g, d == 1 ? 100 : 25, 1.0);
  const SignalArray x = noise(g, 1.0, 7);
  for (auto _ : state) benchmark::DoNotOptimize(mr_statistic(sys, x));
  state.counters["windows"] = static_cast<double>(sys.size());
}
BENCHMARK(BM_MrStatistic)->Args({1, 1024})->Args({2, 64})->Args({2, 128});

void BM_DykstraSweep(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const Grid g(d, static_cast<int>(state.range(1)));
  const ConstraintSystem sys = band_system(g, d == 1 ? 32 : 8, 1.0);
  const SignalArray h = noise(g, 2.0, 11);
  DykstraOptions opt;
  opt.max_sweeps = 1;
  opt.tol = 0.0;
  for (auto _ : state) benchmark::DoNotOptimize(dykstra(h, sys, opt).change);
}
BENCHMARK(BM_DykstraSweep)->Args({1, 256})->Args({2, 64});

void BM_ProxTv2(benchmark::State& state) {
  const Grid g(2, static_cast<int>(state.range(0)));
  const LinearOperator k = LinearOperator::identity(g);
  const SignalArray z = noise(g, 1.0, 3);
  for (auto _ : state) benchmark::DoNotOptimize(prox_tv2(k, z, 1.0, 1e-8).iterations);
}
BENCHMARK(BM_ProxTv2)->Arg(64)->Arg(128);

void BM_ProxTv1Beta(benchmark::State& state) {
  const Grid g(2, static_cast<int>(state.range(0)));
  const LinearOperator k = LinearOperator::identity(g);
  const SignalArray z = noise(g, 1.0, 5);
  for (auto _ : state) {
    benchmark::DoNotOptimize(prox_tv1beta(k, z, 0.25, 1e-8, 1e-6, 50).iterations);
  }
}
BENCHMARK(BM_ProxTv1Beta)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_TautString(benchmark::State& state) {
  const Grid g(1, static_cast<int>(state.range(0)));
  const SignalArray z = noise(g, 1.0, 9);
  for (auto _ : state) benchmark::DoNotOptimize(prox_tautstring(z, 2.0)[0]);
}
BENCHMARK(BM_TautString)->Arg(1024)->Arg(65536);

void BM_Convolution(benchmark::State& state) {
  const Grid g(2, static_cast<int>(state.range(0)));
  const auto method = state.range(1) == 0 ? ConvolutionMethod::Spatial : ConvolutionMethod::Fourier;
  const LinearOperator k = LinearOperator::convolution(g, gaussian_kernel(4.34, default_radius(4.34)), method);
  const SignalArray u = noise(g, 1.0, 13);
  for (auto _ : state) benchmark::DoNotOptimize(k.apply(u)[0]);
}
BENCHMARK(BM_Convolution)->Args({64, 0})->Args({64, 1})->Args({256, 0})->Args({256, 1});

void BM_AdmmRegress1d(benchmark::State& state) {
  const Grid g(1, 256);
  const ConstraintSystem sys = band_system(g, 32, 3.0);
  const SignalArray y = noise(g, 1.0, 17);
  AdmmConfig cfg;
  cfg.tau = 1e-3;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        admm_solve(LinearOperator::identity(g), y, Regularizer::tv2(), sys, cfg).iterations);
  }
}
BENCHMARK(BM_AdmmRegress1d)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
