// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on failure.
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "fbsync/biphoton.hpp"
#include "fbsync/classical.hpp"
#include "fbsync/modeops.hpp"
#include "fbsync/qfp.hpp"
#include "oracles/bessel_series.hpp"

using namespace fbsync;

namespace {

constexpr double kRf = 19e9;
constexpr double kOmega = kTwoPi * kRf;
constexpr double kDepth = 1.42;

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0) {
  char buffer[256];
  std::snprintf(buffer, sizeof buffer, pattern, a, b, c);
  return buffer;
}

double max_abs_diff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

Outcome dft_anchors() {
  const double f2 = qfp::dft_fidelity_closed_form(2, 0.02 * kPi);
  const double f10 = qfp::dft_fidelity_closed_form(10, 0.02 * kPi);
  std::mt19937_64 rng(20261016);
  std::uniform_real_distribution<double> x(0.0, kTwoPi);
  double worst = 0.0;
  for (int d = 1; d <= 10; ++d) {
    const auto w = qfp::dft_matrix(d);
    for (int i = 0; i < 1000; ++i) {
      const double ot = x(rng);
      worst = std::max(worst, std::abs(qfp::dft_fidelity_closed_form(d, ot) -
                                       qfp::matrix_fidelity(w, qfp::shifted_gate(w, ot))));
    }
  }
  const bool pass = std::abs(f2 - 0.9980) <= 5e-4 && std::abs(f10 - 0.9367) <= 5e-4 && worst <= 1e-12;
  return {pass, fmt("F(2)=%.6f F(10)=%.6f max|closed-matrix|=%.2e", f2, f10, worst)};
}

Outcome delay_bound() {
  const double phase = kOmega * 0.5e-12;
  const double tau = qfp::max_tolerable_delay(2, 0.9980, kOmega).tau_s;
  const bool pass = std::abs(phase / kPi - 0.019) < 1e-12 && phase < 0.02 * kPi && tau >= 0.50e-12 &&
                    tau <= 0.56e-12;
  return {pass, fmt("Omega*0.5ps=%.5fpi tau_max(d=2,0.998)=%.4f ps", phase / kPi, tau * 1e12)};
}

Outcome classical_oracle() {
  double worst_line = 0.0;
  double worst_energy = 0.0;
  constexpr int kOrder = 30;
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < 10; ++j) {
      const modeops::SinusoidDrive drive{kRf, 3.0 * i / 4.0, 0.0, 0.0};
      const double tau = 0.5 / kRf * j / 9.0;
      const auto lines = classical::cancellation_spectrum(drive, tau, kOrder);
      const double x = 2.0 * drive.depth_rad * std::abs(std::sin(kOmega * tau / 2.0));
      double total = 0.0;
      for (const auto& line : lines) {
        const double j_k = oracle::bessel_j(line.order, x);
        worst_line = std::max(worst_line, std::abs(line.power - j_k * j_k));
        total += line.power;
      }
      worst_energy = std::max(worst_energy, std::abs(total - 1.0));
    }
  }
  return {worst_line <= 1e-9 && worst_energy <= 1e-10,
          fmt("50 points: max|P_k-J_k^2|=%.2e max|sum-1|=%.2e", worst_line, worst_energy)};
}

Outcome timing_resolution() {
  const modeops::SinusoidDrive drive{kRf, kDepth, 0.0, 0.0};
  const double tau = classical::invert_suppression(-35.0, drive).tau_s;
  return {std::abs(tau - 0.21e-12) <= 0.03e-12, fmt("tau(-35 dBc)=%.4f ps", tau * 1e12)};
}

Outcome nonlocal_cancellation() {
  using namespace biphoton;
  const modeops::SinusoidDrive base{kRf, kDepth, 0.0, 0.0};
  const auto scan = ScanGeometry::centered();
  MeasurementModel model;
  model.passband_bins = 0;
  const auto policy = modeops::TruncationPolicy::for_depth(kDepth);
  const auto state = make_source_state(model, scan, policy.guard_bins);

  const auto [s_out, i_out] = drive_pair(DriveMode::out_of_phase, base);
  const auto idle = simulate_jsi(state, model, 2.0, scan);
  const auto out = simulate_jsi(apply_nonlocal_modulation(state, s_out, i_out, policy), model, 2.0, scan);
  const double cancel = max_abs_diff(idle.counts(), out.counts());

  const auto [s_in, i_in] = drive_pair(DriveMode::in_phase, base);
  const auto in = apply_nonlocal_modulation(state, s_in, i_in, policy);
  double marginal = 0.0;
  for (const auto& [q, fraction] : conditional_idler_spectrum(in, 0)) {
    const double j = oracle::bessel_j(q, 2.0 * kDepth);
    marginal = std::max(marginal, std::abs(fraction - j * j));
  }
  return {cancel <= 1e-8 && marginal <= 1e-8,
          fmt("max|out-of-phase - unmodulated|=%.2e counts, max|marginal-J_q^2(2.84)|=%.2e", cancel,
              marginal)};
}

Outcome drift_washout() {
  using namespace biphoton;
  const modeops::SinusoidDrive base{kRf, kDepth, 0.0, 0.0};
  const auto scan = ScanGeometry::centered();
  const MeasurementModel model;
  const auto policy = modeops::TruncationPolicy::for_depth(kDepth);
  const auto state = make_source_state(model, scan, policy.guard_bins);
  const auto dist = DelayDistribution::uniform_over_period();
  const auto [s_in, i_in] = drive_pair(DriveMode::in_phase, base);
  const auto [s_out, i_out] = drive_pair(DriveMode::out_of_phase, base);
  const auto a = drift_averaged_jsi(state, s_in, i_in, dist, model, 2.0, 128, scan);
  const auto b = drift_averaged_jsi(state, s_out, i_out, dist, model, 2.0, 128, scan);
  const double diff = max_abs_diff(a.counts(), b.counts());
  return {diff <= 1e-6, fmt("max per-bin |in-phase - out-of-phase|=%.2e counts (peak %.1f)", diff,
                            a.counts().maxCoeff())};
}

Outcome edge_depletion() {
  using namespace biphoton;
  const modeops::SinusoidDrive base{kRf, kDepth, 0.0, 0.0};
  const auto scan = ScanGeometry::centered();
  const MeasurementModel model;  // 7-bin passband
  const auto policy = modeops::TruncationPolicy::for_depth(kDepth);
  const auto state = make_source_state(model, scan, policy.guard_bins);
  const auto [s_out, i_out] = drive_pair(DriveMode::out_of_phase, base);
  const auto jsi = simulate_jsi(apply_nonlocal_modulation(state, s_out, i_out, policy), model, 2.0, scan);
  double edge = 0.0;
  double interior = 1e300;
  for (int n = -3; n <= 3; ++n) {
    const double c = jsi.at(n, -n);
    if (std::abs(n) == 3) {
      edge = std::max(edge, c);
    } else {
      interior = std::min(interior, c);
    }
  }
  return {edge < interior, fmt("max edge pair=%.3f < min interior pair=%.3f counts", edge, interior)};
}

Outcome channel_validity() {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g;
  const DelayDistribution dists[] = {DelayDistribution::fixed(0.37e-12),
                                     DelayDistribution::uniform_over_period(),
                                     DelayDistribution::gaussian(0.1e-12, 1.5e-12)};
  double herm = 0.0, trace = 0.0, min_eig = 0.0, purity = 0.0;
  for (int d : {2, 3, 5, 10}) {
    const auto gate = qfp::dft_matrix(d);
    for (int trial = 0; trial < 5; ++trial) {
      ComplexMatrix m(d, d);
      for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c) m(r, c) = Complex(g(rng), g(rng));
      ComplexMatrix rho_m = trial == 0 ? ComplexMatrix(m.col(0) * m.col(0).adjoint()) : ComplexMatrix(m * m.adjoint());
      rho_m /= rho_m.trace().real();
      const qfp::DensityMatrix rho(rho_m);
      for (const auto& dist : dists) {
        const auto out = qfp::drift_channel(rho, gate, dist, kOmega, 64);
        const auto& s = out.entries();
        herm = std::max(herm, (s - s.adjoint()).cwiseAbs().maxCoeff());
        trace = std::max(trace, std::abs(s.trace() - Complex(1.0, 0.0)));
        min_eig = std::min(min_eig, out.min_eigenvalue());
        if (dist.kind() == DelayDistribution::Kind::fixed) {
          purity = std::max(purity, std::abs(out.purity() - rho.purity()));
        }
      }
    }
  }
  const bool pass = herm <= 1e-12 && trace <= 1e-12 && min_eig >= -1e-10 && purity <= 1e-12;
  return {pass, fmt("max herm err=%.1e, trace err=%.1e, min eig=%.1e", herm, trace, min_eig) +
                    fmt(", point-mass purity change=%.1e", purity)};
}

Outcome fit_recovery() {
  using namespace biphoton;
  const modeops::SinusoidDrive base{kRf, kDepth, 0.0, 0.0};
  const auto scan = ScanGeometry::centered();
  const MeasurementModel model;  // flux 1e3 / s
  const auto policy = modeops::TruncationPolicy::for_depth(kDepth);
  const auto state = make_source_state(model, scan, policy.guard_bins);
  const auto [s_in, i_in] = drive_pair(DriveMode::in_phase, base);
  const auto theory = simulate_jsi(apply_nonlocal_modulation(state, s_in, i_in, policy), model, 2.0, scan);

  const Eigen::MatrixXd affine = (3.0 * theory.counts().array() + 7.0).matrix();
  const JsiGrid exact(affine, theory.signal_grid(), theory.idler_grid(), theory.bin_width_hz(), 2.0);
  const auto clean = fit_theory(exact, theory);

  const auto noisy = sample_counts(exact, 2024);
  const auto fit = fit_theory(noisy, theory);
  const bool pass = std::abs(clean.scale - 3.0) <= 1e-9 && std::abs(clean.offset - 7.0) <= 1e-9 &&
                    std::abs(fit.scale - 3.0) <= 3.0 * fit.scale_stderr;
  return {pass, fmt("noiseless (a,b)=(%.12f, %.12f); Poisson a=%.4f", clean.scale, clean.offset, fit.scale) +
                    fmt(" +- %.4f (%.2f sigma)", fit.scale_stderr, std::abs(fit.scale - 3.0) / fit.scale_stderr)};
}

Outcome shift_theorem() {
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> depth(0.0, 3.0);
  std::uniform_real_distribution<double> tau(-1.0 / kRf, 1.0 / kRf);
  const auto grid = modeops::FrequencyGrid::centered(kRf, 9);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const modeops::SinusoidDrive drive{kRf, depth(rng), 0.0, 0.0};
    const double t = tau(rng);
    const auto policy = modeops::TruncationPolicy::for_depth(drive.depth_rad);
    const auto direct = modeops::eopm_transform(drive.delayed(t), grid, policy);
    const auto shifted = modeops::delay_shift(modeops::eopm_transform(drive, grid, policy), t, kOmega);
    worst = std::max(worst, (direct.matrix() - shifted.matrix()).cwiseAbs().maxCoeff());
  }
  return {worst <= 1e-10, fmt("100 random (delta, tau): max|V(tau) - shift(V(0))|=%.2e", worst)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"DFT fidelity anchors", dft_anchors},
      {"delay bound arithmetic", delay_bound},
      {"classical oracle equivalence", classical_oracle},
      {"timing-resolution anchor", timing_resolution},
      {"nonlocal cancellation", nonlocal_cancellation},
      {"drift washout", drift_washout},
      {"edge depletion", edge_depletion},
      {"channel validity", channel_validity},
      {"fit recovery", fit_recovery},
      {"shift theorem", shift_theorem},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome outcome;
    try {
      outcome = criteria[i].second();
    } catch (const std::exception& e) {
      outcome = {false, std::string("threw: ") + e.what()};
    }
    if (!outcome.pass) ++failures;
    std::printf("[%s] %2zu. %s: %s\n", outcome.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                outcome.detail.c_str());
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
