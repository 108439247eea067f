#pragma once

// Classical two-modulator cancellation: a CW line passes a modulator driven
// by phi(t) and then a second one driven by the 180-degree-out-of-phase copy
// delayed by tau. The residual phase is a sinusoid of depth
// 2 depth |sin(Omega tau / 2)|, so the output lines follow J_k^2 of that depth.

#include <span>
#include <vector>

#include "fbsync/modeops.hpp"

namespace fbsync::classical {

using modeops::SinusoidDrive;

/// Contrast reported when the sideband power underflows (perfect cancellation).
inline constexpr double kContrastFloorDbc = -200.0;
/// Contrast reported when the carrier vanishes (J0 zero of the residual depth).
inline constexpr double kContrastCeilingDbc = 200.0;

struct SpectrumLine {
  int order;
  double power;  // fraction of the input power
};

using LineSpectrum = std::vector<SpectrumLine>;

/// One optical-spectrum-analyzer trace; offsets relative to the carrier.
struct SpectrumTrace {
  std::vector<double> frequency_offsets_hz;
  std::vector<double> powers_dbm;
  double timestamp_s = 0.0;

  /// Throws MalformedTraceError unless offsets are strictly increasing, the
  /// two columns have equal nonzero length, and every value is finite.
  void validate() const;
};

struct SuppressionReport {
  double contrast_dbc;
  double carrier_power;
  double worst_first_order_sideband_power;
  bool at_floor;
};

/// Sideband lookup on measured traces: linear power is summed over samples
/// within +-window_hz of each expected line. With no sample in the window the
/// nearest sample within half the RF frequency is used instead.
struct TraceLookup {
  double window_hz = 2e9;
};

/// Output line powers |a_k|^2, k = -max_order..max_order, from the sampled
/// field exp(i phi(t)) exp(i phi'(t - tau)).
LineSpectrum cancellation_spectrum(const SinusoidDrive& drive, double tau_s, int max_order);

/// Residual modulation depth 2 depth |sin(Omega tau / 2)|.
double effective_depth(const SinusoidDrive& drive, double tau_s);

/// J_k^2(effective_depth): the closed-form counterpart of cancellation_spectrum.
double analytic_line_power(const SinusoidDrive& drive, double tau_s, int order);

/// Closed-form contrast 10 log10(J_1^2 / J_0^2), clamped to the floor/ceiling.
double analytic_contrast_dbc(const SinusoidDrive& drive, double tau_s);

/// Contrast from carrier and sideband powers (any linear unit).
SuppressionReport suppression_from_powers(double carrier, double lower_sideband,
                                          double upper_sideband);

SuppressionReport suppression_dbc(const LineSpectrum& spectrum);
SuppressionReport suppression_dbc(const SpectrumTrace& trace, double rf_frequency_hz,
                                  const TraceLookup& lookup = {});

struct SweepRow {
  double tau_s;
  double contrast_dbc;
};

/// Contrast of the simulated cancellation spectrum at each delay.
std::vector<SweepRow> tau_sweep(const SinusoidDrive& drive, std::span<const double> tau_grid);

/// `points` delays evenly spaced on (0, T/2].
std::vector<double> half_period_grid(const SinusoidDrive& drive, int points);

/// End of the invertible branch: min(T/2, first delay where J_0 of the
/// residual depth vanishes).
double monotone_branch_end(const SinusoidDrive& drive);

struct DelayEstimate {
  double tau_s;
  bool at_floor;
};

/// Delay whose closed-form contrast equals `contrast_dbc`, by bisection on
/// [0, monotone_branch_end]. Contrasts at or below the floor give tau = 0 with
/// at_floor set; contrasts at or above the value at T/2 throw DomainError.
DelayEstimate invert_suppression(double contrast_dbc, const SinusoidDrive& drive);

struct DriftRow {
  double timestamp_s;
  double contrast_dbc;
  double tau_s;
  bool at_floor;
};

/// Per-trace contrast and inferred delay; traces must be time-ordered.
std::vector<DriftRow> analyze_spectra_series(std::span<const SpectrumTrace> traces,
                                             const SinusoidDrive& drive,
                                             const TraceLookup& lookup = {});

/// Noise-free trace with one sample per line at k * rf_frequency, carrier
/// normalised to `input_power_dbm`. Zero powers are written at -300 dB.
SpectrumTrace synthesize_trace(const SinusoidDrive& drive, double tau_s, double timestamp_s,
                               int max_order = 5, double input_power_dbm = 0.0);

}  // namespace fbsync::classical
