#include "fbsync/classical.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

#include "fbsync/error.hpp"

namespace fbsync::classical {

namespace {

// First zero of J_0.
constexpr double kBesselJ0FirstZero = 2.404825557695772768622;
constexpr double kUnderflowRatio = 1e-20;  // 10 log10 -> -200 dB

double to_milliwatts(double dbm) { return std::pow(10.0, dbm / 10.0); }

// Unclamped closed-form contrast; -inf at tau = 0, +inf at a J_0 zero.
double raw_contrast_dbc(const SinusoidDrive& drive, double tau_s) {
  const double x = effective_depth(drive, tau_s);
  const double j0 = std::cyl_bessel_j(0.0, x);
  const double j1 = std::cyl_bessel_j(1.0, x);
  return 20.0 * std::log10(std::abs(j1) / std::abs(j0));
}

std::optional<double> line_power(const SpectrumTrace& trace, double target_hz,
                                 double rf_frequency_hz, const TraceLookup& lookup) {
  double sum = 0.0;
  bool any = false;
  for (std::size_t i = 0; i < trace.frequency_offsets_hz.size(); ++i) {
    if (std::abs(trace.frequency_offsets_hz[i] - target_hz) <= lookup.window_hz) {
      sum += to_milliwatts(trace.powers_dbm[i]);
      any = true;
    }
  }
  if (any) return sum;

  const auto& f = trace.frequency_offsets_hz;
  const auto it = std::min_element(f.begin(), f.end(), [target_hz](double a, double b) {
    return std::abs(a - target_hz) < std::abs(b - target_hz);
  });
  if (it != f.end() && std::abs(*it - target_hz) <= 0.5 * rf_frequency_hz) {
    return to_milliwatts(trace.powers_dbm[static_cast<std::size_t>(it - f.begin())]);
  }
  return std::nullopt;
}

}  // namespace

void SpectrumTrace::validate() const {
  if (frequency_offsets_hz.empty()) throw MalformedTraceError("trace has no samples");
  if (frequency_offsets_hz.size() != powers_dbm.size()) {
    throw MalformedTraceError("trace offset and power columns differ in length");
  }
  if (!std::isfinite(timestamp_s) || timestamp_s < 0.0) {
    throw MalformedTraceError("trace timestamp must be finite and nonnegative");
  }
  for (std::size_t i = 0; i < frequency_offsets_hz.size(); ++i) {
    if (!std::isfinite(frequency_offsets_hz[i]) || !std::isfinite(powers_dbm[i])) {
      throw MalformedTraceError("trace contains non-finite values at row " + std::to_string(i));
    }
    if (i > 0 && !(frequency_offsets_hz[i] > frequency_offsets_hz[i - 1])) {
      throw MalformedTraceError("trace offsets are not strictly increasing at row " +
                                std::to_string(i));
    }
  }
}

LineSpectrum cancellation_spectrum(const SinusoidDrive& drive, double tau_s, int max_order) {
  drive.validate();
  if (max_order < 2) throw ConfigError("cancellation spectrum: max_order must be >= 2");
  if (!std::isfinite(tau_s)) throw ConfigError("cancellation spectrum: tau must be finite");
  const SinusoidDrive second = drive.out_of_phase().delayed(tau_s);
  const auto coeffs = modeops::phase_fourier_coefficients(
      [&](double t) { return drive.phase_at(t) + second.phase_at(t); }, drive.period_s(),
      max_order);
  LineSpectrum lines;
  lines.reserve(static_cast<std::size_t>(2 * max_order + 1));
  for (int k = -max_order; k <= max_order; ++k) lines.push_back({k, std::norm(coeffs[k])});
  return lines;
}

double effective_depth(const SinusoidDrive& drive, double tau_s) {
  return 2.0 * drive.depth_rad * std::abs(std::sin(0.5 * drive.angular_frequency() * tau_s));
}

double analytic_line_power(const SinusoidDrive& drive, double tau_s, int order) {
  const double j = std::cyl_bessel_j(static_cast<double>(std::abs(order)),
                                     effective_depth(drive, tau_s));
  return j * j;
}

double analytic_contrast_dbc(const SinusoidDrive& drive, double tau_s) {
  const double c = raw_contrast_dbc(drive, tau_s);
  if (std::isnan(c)) return kContrastFloorDbc;
  return std::clamp(c, kContrastFloorDbc, kContrastCeilingDbc);
}

SuppressionReport suppression_from_powers(double carrier, double lower_sideband,
                                          double upper_sideband) {
  if (!(carrier >= 0.0) || !(lower_sideband >= 0.0) || !(upper_sideband >= 0.0)) {
    throw DomainError("suppression: powers must be nonnegative");
  }
  const double worst = std::max(lower_sideband, upper_sideband);
  SuppressionReport report{0.0, carrier, worst, false};
  if (carrier <= 0.0) {
    if (worst <= 0.0) throw DegenerateInputError("suppression: carrier and sidebands are all zero");
    report.contrast_dbc = kContrastCeilingDbc;
    return report;
  }
  const double ratio = worst / carrier;
  if (ratio <= kUnderflowRatio) {
    report.contrast_dbc = kContrastFloorDbc;
    report.at_floor = true;
    return report;
  }
  report.contrast_dbc = std::min(10.0 * std::log10(ratio), kContrastCeilingDbc);
  return report;
}

SuppressionReport suppression_dbc(const LineSpectrum& spectrum) {
  std::optional<double> carrier, lower, upper;
  for (const auto& line : spectrum) {
    if (line.order == 0) carrier = line.power;
    if (line.order == -1) lower = line.power;
    if (line.order == 1) upper = line.power;
  }
  if (!carrier || !lower || !upper) {
    throw DomainError("suppression: spectrum lacks the carrier or a first-order line");
  }
  return suppression_from_powers(*carrier, *lower, *upper);
}

SuppressionReport suppression_dbc(const SpectrumTrace& trace, double rf_frequency_hz,
                                  const TraceLookup& lookup) {
  trace.validate();
  if (!(rf_frequency_hz > 0.0)) throw ConfigError("suppression: rf frequency must be positive");
  if (!(lookup.window_hz >= 0.0)) throw ConfigError("suppression: lookup window must be >= 0");
  const auto carrier = line_power(trace, 0.0, rf_frequency_hz, lookup);
  const auto lower = line_power(trace, -rf_frequency_hz, rf_frequency_hz, lookup);
  const auto upper = line_power(trace, rf_frequency_hz, rf_frequency_hz, lookup);
  if (!carrier) throw MalformedTraceError("no trace samples near the carrier");
  if (!lower || !upper) throw MalformedTraceError("no trace samples near a first-order sideband");
  return suppression_from_powers(*carrier, *lower, *upper);
}

std::vector<SweepRow> tau_sweep(const SinusoidDrive& drive, std::span<const double> tau_grid) {
  if (tau_grid.empty()) throw ConfigError("tau sweep: delay grid is empty");
  std::vector<SweepRow> rows;
  rows.reserve(tau_grid.size());
  for (double tau : tau_grid) {
    rows.push_back({tau, suppression_dbc(cancellation_spectrum(drive, tau, 2)).contrast_dbc});
  }
  return rows;
}

std::vector<double> half_period_grid(const SinusoidDrive& drive, int points) {
  drive.validate();
  if (points < 1) throw ConfigError("tau grid: need at least one point");
  const double half = 0.5 * drive.period_s();
  std::vector<double> grid(static_cast<std::size_t>(points));
  for (int j = 0; j < points; ++j) grid[static_cast<std::size_t>(j)] = half * (j + 1) / points;
  return grid;
}

double monotone_branch_end(const SinusoidDrive& drive) {
  drive.validate();
  const double half = 0.5 * drive.period_s();
  const double peak_depth = 2.0 * drive.depth_rad;
  if (peak_depth <= kBesselJ0FirstZero) return half;
  return 2.0 * std::asin(kBesselJ0FirstZero / peak_depth) / drive.angular_frequency();
}

DelayEstimate invert_suppression(double contrast_dbc, const SinusoidDrive& drive) {
  drive.validate();
  if (std::isnan(contrast_dbc)) throw DomainError("invert suppression: contrast is NaN");
  if (contrast_dbc <= kContrastFloorDbc) return {0.0, true};
  if (drive.depth_rad == 0.0) {
    throw DomainError("invert suppression: an unmodulated drive cannot produce sidebands");
  }

  const double half = 0.5 * drive.period_s();
  const double at_half = raw_contrast_dbc(drive, half);
  if (contrast_dbc >= at_half) {
    std::ostringstream os;
    os << "invert suppression: contrast " << contrast_dbc
       << " dBc is not below the half-period value " << at_half << " dBc";
    throw DomainError(os.str());
  }

  double lo = 0.0;
  double hi = monotone_branch_end(drive);
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (raw_contrast_dbc(drive, mid) < contrast_dbc) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return {0.5 * (lo + hi), false};
}

std::vector<DriftRow> analyze_spectra_series(std::span<const SpectrumTrace> traces,
                                             const SinusoidDrive& drive,
                                             const TraceLookup& lookup) {
  if (traces.empty()) throw ConfigError("spectra series: no traces");
  std::vector<DriftRow> rows;
  rows.reserve(traces.size());
  for (std::size_t i = 0; i < traces.size(); ++i) {
    const std::string where = "trace " + std::to_string(i) + ": ";
    if (i > 0 && traces[i].timestamp_s < traces[i - 1].timestamp_s) {
      throw ConfigError(where + "timestamps are not in time order");
    }
    try {
      const auto report = suppression_dbc(traces[i], drive.rf_frequency_hz, lookup);
      const auto estimate = invert_suppression(report.contrast_dbc, drive);
      rows.push_back({traces[i].timestamp_s, report.contrast_dbc, estimate.tau_s,
                      estimate.at_floor});
    } catch (const MalformedTraceError& e) {
      throw MalformedTraceError(where + e.what());
    } catch (const DomainError& e) {
      throw DomainError(where + e.what());
    } catch (const DegenerateInputError& e) {
      throw DegenerateInputError(where + e.what());
    }
  }
  return rows;
}

SpectrumTrace synthesize_trace(const SinusoidDrive& drive, double tau_s, double timestamp_s,
                               int max_order, double input_power_dbm) {
  const auto lines = cancellation_spectrum(drive, tau_s, std::max(max_order, 2));
  SpectrumTrace trace;
  trace.timestamp_s = timestamp_s;
  for (const auto& line : lines) {
    if (std::abs(line.order) > max_order) continue;
    trace.frequency_offsets_hz.push_back(line.order * drive.rf_frequency_hz);
    trace.powers_dbm.push_back(input_power_dbm + 10.0 * std::log10(std::max(line.power, 1e-30)));
  }
  return trace;
}

}  // namespace fbsync::classical
