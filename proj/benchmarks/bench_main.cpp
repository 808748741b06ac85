#include <benchmark/benchmark.h>

#include <cmath>

#include "bilat/analysis.hpp"
#include "bilat/bounds.hpp"
#include "bilat/experiments.hpp"

using namespace bilat;

namespace {

VectorDelaySystem fig1a(double x01) { return preset_system(find_preset("fig1a-vdp"), x01); }

}  // namespace

static void BM_IntegrateDelayedDecay(benchmark::State& state) {
  const DdeRhs rhs = [](double, std::span<const double>, std::span<const double> d, std::span<double> out) {
    out[0] = -d[0];
  };
  StepConfig c;
  c.dt = 1.0 / static_cast<double>(state.range(0));
  for (auto _ : state) {
    auto tr = integrate(rhs, DelaySet::constant({1.0}), HistoryFunction::constant({1.0}), 0.0, 50.0, c);
    benchmark::DoNotOptimize(tr.node_data().data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(50 * state.range(0)));
}
BENCHMARK(BM_IntegrateDelayedDecay)->Arg(100)->Arg(1000);

static void BM_SimulateOscillators(benchmark::State& state) {
  const auto sys = fig1a(0.01);
  for (auto _ : state) benchmark::DoNotOptimize(simulate(sys, 50.0, {}).norms.back());
}
BENCHMARK(BM_SimulateOscillators)->Unit(benchmark::kMillisecond);

static void BM_SpectralNorm(benchmark::State& state) {
  const auto n = static_cast<Eigen::Index>(state.range(0));
  CMatrix M = CMatrix::Random(n, n);
  for (auto _ : state) benchmark::DoNotOptimize(spectral_norm(M));
}
BENCHMARK(BM_SpectralNorm)->Arg(4)->Arg(16)->Arg(64);

static void BM_Eigendecompose(benchmark::State& state) {
  const auto sys = fig1a(0.1);
  for (auto _ : state) benchmark::DoNotOptimize(eigendecompose(sys.A_star).norm_V);
}
BENCHMARK(BM_Eigendecompose);

static void BM_SolveBounds(benchmark::State& state) {
  const auto sys = fig1a(0.01);
  const auto esys = to_eigenbasis(sys, eigendecompose(sys.A_star));
  const auto L = build_majorant(sys.nonlinearity, esys.decomposition(), esys.slots());
  const auto up = build_upper(esys, L);
  const auto low = build_lower(esys, L);
  for (auto _ : state) benchmark::DoNotOptimize(solve_bounds(up, low, 50.0, {}).common_end());
}
BENCHMARK(BM_SolveBounds)->Unit(benchmark::kMillisecond);

static void BM_ScalarRadius(benchmark::State& state) {
  const auto sys = fig1a(0.1);
  const auto esys = to_eigenbasis(sys, eigendecompose(sys.A_star));
  const auto L = build_majorant(sys.nonlinearity, esys.decomposition(), esys.slots());
  const auto up = build_upper(esys, L).tabulated(50.0, {});
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        estimate_scalar_radius([&](double c) { return up.with_constant_history(c); }, 50.0, 1e5).radius);
  }
}
BENCHMARK(BM_ScalarRadius)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
