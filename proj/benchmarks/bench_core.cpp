#include <benchmark/benchmark.h>

#include <numbers>

#include "qcdma/duffing.hpp"
#include "qcdma/fock.hpp"
#include "qcdma/spectral.hpp"

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

qcdma::chaos::DuffingParams chaotic_params() {
  qcdma::chaos::DuffingParams p;
  p.well = qcdma::chaos::WellShape::DoubleWell;
  return p;
}

void BM_Integrate(benchmark::State& state) {
  const auto params = chaotic_params();
  const double horizon = static_cast<double>(state.range(0)) * kTwoPi / params.omega_d;
  for (auto _ : state) {
    auto traj = qcdma::chaos::integrate(params, {0.1, 0.0}, horizon, 1e-3 * kTwoPi);
    benchmark::DoNotOptimize(traj.x.back());
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<std::int64_t>(horizon / (1e-3 * kTwoPi)));
}
BENCHMARK(BM_Integrate)->Arg(100)->Arg(500);

void BM_WelchPsd(benchmark::State& state) {
  const auto params = chaotic_params();
  const auto traj =
      qcdma::chaos::integrate(params, {0.1, 0.0}, 500.0 * kTwoPi / params.omega_d, 1e-3 * kTwoPi);
  for (auto _ : state) {
    auto psd = qcdma::spectral::estimate_psd(traj.delta, traj.dt, 8);
    benchmark::DoNotOptimize(psd.density[1]);
  }
}
BENCHMARK(BM_WelchPsd);

void BM_SingleShot(benchmark::State& state) {
  qcdma::fock::SimConfig cfg;
  cfg.dim = 8;
  cfg.working_dim = static_cast<int>(state.range(0));
  for (auto _ : state) {
    auto [r3, r4] = qcdma::fock::run_single_shot(0.3, 1.1, {0.6}, {0.4}, cfg);
    benchmark::DoNotOptimize(r3.rho(0, 0));
    benchmark::DoNotOptimize(r4.rho(0, 0));
  }
}
BENCHMARK(BM_SingleShot)->Arg(20)->Arg(32);

void BM_ReducedChannel(benchmark::State& state) {
  qcdma::fock::SimConfig cfg;
  cfg.dim = 8;
  for (auto _ : state) {
    auto rho = qcdma::fock::reduced_channel_output({0.08, 0.03}, {0.07, -0.02},
                                                   {0.6}, {0.4}, cfg);
    benchmark::DoNotOptimize(rho.rho(0, 0));
  }
}
BENCHMARK(BM_ReducedChannel);

}  // namespace

BENCHMARK_MAIN();
