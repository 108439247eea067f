#pragma once

// Frequency-bin entangled photon pairs under nonlocal phase modulation and the
// coincidence (JSI) measurement that observes them.
//
// The joint amplitude A(m, k) is indexed by signal bin m and idler bin k, both
// labelled by actual optical frequency offset from the degenerate point, so
// energy-conserving pairs sit at k = -m.

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "fbsync/delay_distribution.hpp"
#include "fbsync/modeops.hpp"

namespace fbsync::biphoton {

using modeops::FrequencyGrid;
using modeops::SinusoidDrive;
using modeops::TruncationPolicy;

class BiphotonState {
 public:
  /// Throws ConfigError if shapes mismatch or the Frobenius norm exceeds 1.
  BiphotonState(ComplexMatrix amplitude, FrequencyGrid signal_grid, FrequencyGrid idler_grid);

  const ComplexMatrix& amplitude() const noexcept { return amplitude_; }
  const FrequencyGrid& signal_grid() const noexcept { return signal_grid_; }
  const FrequencyGrid& idler_grid() const noexcept { return idler_grid_; }

  double norm() const { return amplitude_.norm(); }
  Complex amplitude_at(int signal_bin, int idler_bin) const;
  /// |A(m, k)|^2, zero outside the stored grids.
  double probability(int signal_bin, int idler_bin) const;

 private:
  ComplexMatrix amplitude_;
  FrequencyGrid signal_grid_;
  FrequencyGrid idler_grid_;
};

/// Scanned filter bins of the JSI measurement.
struct ScanGeometry {
  FrequencyGrid signal_grid;
  FrequencyGrid idler_grid;
  double bin_width_hz;

  /// Square scan of `bins` bins centred on bin 0 in both arms (default 9 x 9,
  /// 12 GHz filters on a 19 GHz comb).
  static ScanGeometry centered(double bin_spacing_hz = 19e9, int bins = 9,
                               double bin_width_hz = 12e9);
};

struct MeasurementModel {
  int passband_bins = 7;          // source-side passband; 0 means broadband
  double filter_crosstalk = 0.02; // leakage into each adjacent scanned bin
  double accidental_rate = 0.0;   // counts / s per bin pair
  double flux_scale = 1e3;        // pairs / s

  void validate() const;
};

/// Expected or measured coincidence counts on a scan.
class JsiGrid {
 public:
  JsiGrid(Eigen::MatrixXd counts, FrequencyGrid signal_grid, FrequencyGrid idler_grid,
          double bin_width_hz, double integration_s);

  const Eigen::MatrixXd& counts() const noexcept { return counts_; }
  const FrequencyGrid& signal_grid() const noexcept { return signal_grid_; }
  const FrequencyGrid& idler_grid() const noexcept { return idler_grid_; }
  double bin_width_hz() const noexcept { return bin_width_hz_; }
  double bin_spacing_hz() const noexcept { return signal_grid_.bin_spacing_hz(); }
  double integration_s() const noexcept { return integration_s_; }

  double at(int signal_bin, int idler_bin) const;

 private:
  Eigen::MatrixXd counts_;
  FrequencyGrid signal_grid_;
  FrequencyGrid idler_grid_;
  double bin_width_hz_;
  double integration_s_;
};

/// Anticorrelated pairs (n, -n) over `num_pairs` signal bins centred on 0,
/// amplitudes proportional to sqrt(weights), unit norm.
BiphotonState make_entangled_state(int num_pairs, std::span<const double> weights,
                                   double bin_spacing_hz = 19e9);

/// Flat state for a measurement: `model.passband_bins` pairs, or with a
/// broadband source (passband 0) enough pairs to cover the scan plus
/// `guard_bins` on each side.
BiphotonState make_source_state(const MeasurementModel& model, const ScanGeometry& scan,
                                int guard_bins);

/// A' = V_s A V_i^T with each arm's modulator transform.
BiphotonState apply_nonlocal_modulation(const BiphotonState& state,
                                        const SinusoidDrive& signal_drive,
                                        const SinusoidDrive& idler_drive,
                                        const TruncationPolicy& policy);

/// Expected counts: flux * T * (crosstalk-smeared |A|^2) + accidentals * T.
/// Smearing applies the kernel [x, 1 - 2x, x] along each axis and reads the
/// state one bin beyond the scan edges.
JsiGrid simulate_jsi(const BiphotonState& state, const MeasurementModel& model,
                     double integration_s, const ScanGeometry& scan = ScanGeometry::centered());

/// Incoherent average over the relative delay law of the per-delay JSI; the
/// delay is applied to the idler drive.
JsiGrid drift_averaged_jsi(const BiphotonState& state, const SinusoidDrive& signal_drive,
                           const SinusoidDrive& idler_drive, const DelayDistribution& dist,
                           const MeasurementModel& model, double integration_s,
                           int quad_points, const ScanGeometry& scan = ScanGeometry::centered());

/// Coincidences with the signal filter fixed on `signal_bin` and the idler
/// scanned over the state's idler grid, normalised to sum to 1. Returns
/// (idler bin, fraction) pairs.
std::vector<std::pair<int, double>> conditional_idler_spectrum(const BiphotonState& state,
                                                               int signal_bin);

enum class DriveMode { unmodulated, in_phase, out_of_phase };

/// Signal and idler drives for a mode; unmodulated zeroes the depth.
std::pair<SinusoidDrive, SinusoidDrive> drive_pair(DriveMode mode, const SinusoidDrive& base);

struct FitResult {
  double scale;
  double offset;
  double residual_rms;
  double scale_stderr;
  double offset_stderr;
};

/// Closed-form least squares measured ~ scale * theory + offset over every bin pair.
FitResult fit_theory(const JsiGrid& measured, const JsiGrid& theory);

/// Independent Poisson draw per bin pair; the stream for each bin depends
/// only on (seed, row-major bin index).
JsiGrid sample_counts(const JsiGrid& expected, std::uint64_t seed);

}  // namespace fbsync::biphoton
