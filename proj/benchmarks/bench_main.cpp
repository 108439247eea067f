#include <benchmark/benchmark.h>

#include "fbsync/biphoton.hpp"
#include "fbsync/classical.hpp"
#include "fbsync/modeops.hpp"
#include "fbsync/qfp.hpp"

using namespace fbsync;

namespace {

void BM_EopmTransform(benchmark::State& state) {
  const modeops::SinusoidDrive drive{19e9, 1.42, 0.3e-12, 0.0};
  const auto grid = modeops::FrequencyGrid::centered(19e9, static_cast<int>(state.range(0)));
  const auto policy = modeops::TruncationPolicy::for_depth(1.42);
  for (auto _ : state) benchmark::DoNotOptimize(modeops::eopm_transform(drive, grid, policy));
}
BENCHMARK(BM_EopmTransform)->Arg(9)->Arg(33)->Arg(129);

void BM_ClassicalSweep(benchmark::State& state) {
  const modeops::SinusoidDrive drive{19e9, 1.42, 0.0, 0.0};
  const auto grid = classical::half_period_grid(drive, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(classical::tau_sweep(drive, grid));
}
BENCHMARK(BM_ClassicalSweep)->Arg(500);

void BM_DriftAveragedJsi(benchmark::State& state) {
  using namespace biphoton;
  const modeops::SinusoidDrive base{19e9, 1.42, 0.0, 0.0};
  const auto scan = ScanGeometry::centered();
  const MeasurementModel model;
  const auto src = make_source_state(model, scan, 11);
  const auto [s, i] = drive_pair(DriveMode::in_phase, base);
  const auto dist = DelayDistribution::uniform_over_period();
  const int points = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(drift_averaged_jsi(src, s, i, dist, model, 2.0, points, scan));
  }
}
BENCHMARK(BM_DriftAveragedJsi)->Arg(16)->Arg(128);

void BM_DriftChannel(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const auto gate = qfp::dft_matrix(d);
  const auto rho = qfp::DensityMatrix::maximally_mixed(d);
  const auto dist = DelayDistribution::gaussian(0.0, 1e-12);
  for (auto _ : state) {
    benchmark::DoNotOptimize(qfp::drift_channel(rho, gate, dist, kTwoPi * 19e9, 64));
  }
}
BENCHMARK(BM_DriftChannel)->Arg(2)->Arg(10);

void BM_FidelitySweep(benchmark::State& state) {
  for (auto _ : state) {
    double acc = 0.0;
    for (int d = 2; d <= 10; ++d) {
      for (int k = 0; k < 101; ++k) acc += qfp::dft_fidelity_closed_form(d, 0.25 * kPi * k / 100.0);
    }
    benchmark::DoNotOptimize(acc);
  }
}
BENCHMARK(BM_FidelitySweep);

void BM_MatrixFidelitySweep(benchmark::State& state) {
  const auto gate = qfp::dft_matrix(10);
  for (auto _ : state) {
    double acc = 0.0;
    for (int k = 0; k < 101; ++k) acc += qfp::matrix_fidelity(gate, qfp::shifted_gate(gate, 0.25 * kPi * k / 100.0));
    benchmark::DoNotOptimize(acc);
  }
}
BENCHMARK(BM_MatrixFidelitySweep);

}  // namespace

BENCHMARK_MAIN();
