#pragma once

// Frequency-bin mode transforms for electro-optic phase modulators and
// line-by-line pulse shapers.
//
// Fourier convention used throughout the library:
//
//   exp(i phi(t)) = sum_k c_k exp(-i k Omega t),
//   c_k = (1/T) int_T exp(i phi(t)) exp(i k Omega t) dt.
//
// A modulator maps input bin n to output bin m with amplitude c_{m-n}. For
// phi(t) = depth sin(Omega t) this gives c_k = J_{-k}(depth) = (-1)^k J_k(depth).

#include <complex>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace fbsync {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

namespace modeops {

/// Comb of `num_bins` adjacent frequency bins. Bin k sits at absolute index
/// index_offset + k, i.e. (index_offset + k) * bin_spacing_hz away from the
/// reference bin 0.
class FrequencyGrid {
 public:
  FrequencyGrid(double bin_spacing_hz, int num_bins, int index_offset = 0);

  /// Grid of `num_bins` bins placed symmetrically around bin 0 (for even
  /// counts the extra bin goes below zero).
  static FrequencyGrid centered(double bin_spacing_hz, int num_bins);

  double bin_spacing_hz() const noexcept { return spacing_hz_; }
  int num_bins() const noexcept { return num_bins_; }
  int index_offset() const noexcept { return offset_; }
  int first_index() const noexcept { return offset_; }
  int last_index() const noexcept { return offset_ + num_bins_ - 1; }

  int absolute_index(int position) const noexcept { return offset_ + position; }
  bool contains(int absolute) const noexcept {
    return absolute >= first_index() && absolute <= last_index();
  }
  std::optional<int> position_of(int absolute) const noexcept;
  double offset_hz(int position) const noexcept {
    return absolute_index(position) * spacing_hz_;
  }

  /// Same grid with `guard` extra bins on each side.
  FrequencyGrid extended(int guard) const;

  /// Same bins (offset and count) on the same spacing, up to 1e-9 relative.
  bool same_bins(const FrequencyGrid& other) const noexcept;

  friend bool operator==(const FrequencyGrid&, const FrequencyGrid&) = default;

 private:
  double spacing_hz_;
  int num_bins_;
  int offset_;
};

/// Sinusoidal RF drive: phi(t) = depth_rad * sin(Omega (t - delay_s) + phase_rad).
struct SinusoidDrive {
  double rf_frequency_hz = 19e9;
  double depth_rad = 1.42;
  double delay_s = 0.0;
  double phase_rad = 0.0;

  /// Throws ConfigError unless rf_frequency_hz > 0 and depth_rad >= 0 (all finite).
  void validate() const;

  double angular_frequency() const noexcept { return kTwoPi * rf_frequency_hz; }
  double period_s() const noexcept { return 1.0 / rf_frequency_hz; }
  double phase_at(double t) const noexcept;

  SinusoidDrive delayed(double extra_delay_s) const noexcept;
  /// The 180-degree-out-of-phase copy (phase shifted by pi).
  SinusoidDrive out_of_phase() const noexcept;
};

/// How far a truncated modulator matrix extends beyond its input grid.
struct TruncationPolicy {
  int guard_bins = 12;
  double coefficient_floor = 1e-10;

  /// guard = ceil(depth) + 8, widened until |J_k(depth)| < floor for all k > guard.
  static TruncationPolicy for_depth(double depth_rad, double coefficient_floor = 1e-10);
};

/// Truncated mode transformation b_m = sum_n V_mn a_n. Rows follow out_grid,
/// columns follow in_grid.
class ModeTransform {
 public:
  ModeTransform(ComplexMatrix matrix, FrequencyGrid in_grid, FrequencyGrid out_grid);

  const ComplexMatrix& matrix() const noexcept { return matrix_; }
  const FrequencyGrid& in_grid() const noexcept { return in_grid_; }
  const FrequencyGrid& out_grid() const noexcept { return out_grid_; }

  /// Element between absolute bin indices; zero outside the truncated support.
  Complex element(int out_index, int in_index) const;

  /// Sub-block on smaller grids that lie inside the current ones.
  ModeTransform restricted(const FrequencyGrid& out_grid, const FrequencyGrid& in_grid) const;

 private:
  ComplexMatrix matrix_;
  FrequencyGrid in_grid_;
  FrequencyGrid out_grid_;
};

/// Fourier coefficients c_{-K}..c_{+K} of a periodic phase modulation.
class Coefficients {
 public:
  Coefficients(int max_order, std::vector<Complex> values);

  int max_order() const noexcept { return max_order_; }
  /// c_k, zero for |k| > max_order.
  Complex operator[](int k) const noexcept;
  const std::vector<Complex>& values() const noexcept { return values_; }
  /// sum_k |c_k|^2 over the stored orders.
  double captured_power() const noexcept;

 private:
  int max_order_;
  std::vector<Complex> values_;
};

/// Number of uniform samples per RF period used for coefficient quadrature.
inline constexpr int kPeriodSamples = 4096;

/// Coefficients of exp(i phase(t)) for an arbitrary T-periodic phase, by
/// uniform sampling of one period and a direct discrete Fourier sum.
Coefficients phase_fourier_coefficients(const std::function<double(double)>& phase,
                                        double period_s, int max_order,
                                        int samples = kPeriodSamples);

/// Modulator coefficients for one drive. Throws TruncationError when the
/// stored orders capture less than 1 - coefficient_floor of the power.
Coefficients eopm_coefficients(const SinusoidDrive& drive, int max_order,
                               double coefficient_floor = 1e-10);

/// Banded Toeplitz transform V_mn = c_{m-n}; the output grid is the input
/// grid plus policy.guard_bins on each side. The grid spacing must equal the
/// RF frequency.
ModeTransform eopm_transform(const SinusoidDrive& drive, const FrequencyGrid& in_grid,
                             const TruncationPolicy& policy);

/// Diagonal transform with per-bin complex transmission (|t| <= 1).
ModeTransform pulse_shaper_transform(std::span<const Complex> mask, const FrequencyGrid& grid);

/// Rectangular passband of total width `bandwidth_hz` centred on `center_hz`;
/// bins whose centre falls inside (edges inclusive) transmit 1.
std::vector<Complex> bandpass_mask(const FrequencyGrid& grid, double bandwidth_hz,
                                   double center_hz = 0.0);

/// Spectral phase exp(i curvature * m^2) on absolute bin index m.
std::vector<Complex> quadratic_phase_mask(const FrequencyGrid& grid, double curvature_rad);

/// W = V^(Q) ... V^(1) for stages given in propagation order.
ModeTransform cascade(std::span<const ModeTransform> stages);

/// W~_mn = exp(i (m - n) omega tau) W_mn: the whole-processor effect of
/// delaying every RF drive by tau.
ModeTransform delay_shift(const ModeTransform& transform, double tau_s, double omega);

}  // namespace modeops
}  // namespace fbsync
