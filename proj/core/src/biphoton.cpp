#include "fbsync/biphoton.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "fbsync/error.hpp"

namespace fbsync::biphoton {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

void require_same_spacing(const FrequencyGrid& grid, const SinusoidDrive& drive,
                          const char* arm) {
  const double a = grid.bin_spacing_hz();
  const double b = drive.rf_frequency_hz;
  if (std::abs(a - b) > 1e-9 * std::max(a, b)) {
    std::ostringstream os;
    os << "nonlocal modulation: " << arm << " drive at " << b << " Hz does not match bin spacing "
       << a << " Hz";
    throw ConfigError(os.str());
  }
}

}  // namespace

BiphotonState::BiphotonState(ComplexMatrix amplitude, FrequencyGrid signal_grid,
                             FrequencyGrid idler_grid)
    : amplitude_(std::move(amplitude)), signal_grid_(signal_grid), idler_grid_(idler_grid) {
  if (amplitude_.rows() != signal_grid_.num_bins() || amplitude_.cols() != idler_grid_.num_bins()) {
    throw ConfigError("biphoton state: amplitude shape does not match its grids");
  }
  if (!amplitude_.allFinite()) throw ConfigError("biphoton state: non-finite amplitude");
  if (amplitude_.norm() > 1.0 + 1e-9) {
    throw ConfigError("biphoton state: Frobenius norm exceeds 1");
  }
}

Complex BiphotonState::amplitude_at(int signal_bin, int idler_bin) const {
  const auto r = signal_grid_.position_of(signal_bin);
  const auto c = idler_grid_.position_of(idler_bin);
  if (!r || !c) return {};
  return amplitude_(*r, *c);
}

double BiphotonState::probability(int signal_bin, int idler_bin) const {
  return std::norm(amplitude_at(signal_bin, idler_bin));
}

ScanGeometry ScanGeometry::centered(double bin_spacing_hz, int bins, double bin_width_hz) {
  if (!(bin_width_hz > 0.0)) throw ConfigError("scan: bin width must be positive");
  const auto grid = FrequencyGrid::centered(bin_spacing_hz, bins);
  return ScanGeometry{grid, grid, bin_width_hz};
}

void MeasurementModel::validate() const {
  if (passband_bins < 0) throw ConfigError("measurement model: passband_bins must be >= 0");
  if (!(filter_crosstalk >= 0.0) || !(filter_crosstalk < 0.5)) {
    throw ConfigError("measurement model: filter_crosstalk must lie in [0, 0.5)");
  }
  if (!(accidental_rate >= 0.0) || !std::isfinite(accidental_rate)) {
    throw ConfigError("measurement model: accidental_rate must be finite and >= 0");
  }
  if (!(flux_scale > 0.0) || !std::isfinite(flux_scale)) {
    throw ConfigError("measurement model: flux_scale must be finite and > 0");
  }
}

JsiGrid::JsiGrid(Eigen::MatrixXd counts, FrequencyGrid signal_grid, FrequencyGrid idler_grid,
                 double bin_width_hz, double integration_s)
    : counts_(std::move(counts)),
      signal_grid_(signal_grid),
      idler_grid_(idler_grid),
      bin_width_hz_(bin_width_hz),
      integration_s_(integration_s) {
  if (counts_.rows() != signal_grid_.num_bins() || counts_.cols() != idler_grid_.num_bins()) {
    throw ConfigError("jsi grid: counts shape does not match the scan grids");
  }
  if (!(bin_width_hz_ > 0.0) || !(integration_s_ > 0.0)) {
    throw ConfigError("jsi grid: bin width and integration time must be positive");
  }
  if (!counts_.allFinite() || (counts_.size() > 0 && counts_.minCoeff() < 0.0)) {
    throw ConfigError("jsi grid: counts must be finite and nonnegative");
  }
}

double JsiGrid::at(int signal_bin, int idler_bin) const {
  const auto r = signal_grid_.position_of(signal_bin);
  const auto c = idler_grid_.position_of(idler_bin);
  if (!r || !c) throw ConfigError("jsi grid: bin outside the scan");
  return counts_(*r, *c);
}

BiphotonState make_entangled_state(int num_pairs, std::span<const double> weights,
                                   double bin_spacing_hz) {
  if (num_pairs < 1) throw ConfigError("entangled state: num_pairs must be >= 1");
  if (weights.size() != static_cast<std::size_t>(num_pairs)) {
    throw ConfigError("entangled state: weights length must equal num_pairs");
  }
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw ConfigError("entangled state: weights must be finite and nonnegative");
    }
    total += w;
  }
  if (total <= 0.0) throw ConfigError("entangled state: weight vector is all zero");

  const auto signal = FrequencyGrid::centered(bin_spacing_hz, num_pairs);
  // Idler bin of pair j is -(signal bin), so the idler grid is the mirror image.
  const FrequencyGrid idler(bin_spacing_hz, num_pairs, -signal.last_index());
  ComplexMatrix a = ComplexMatrix::Zero(num_pairs, num_pairs);
  for (int j = 0; j < num_pairs; ++j) {
    const int n = signal.absolute_index(j);
    a(j, *idler.position_of(-n)) = std::sqrt(weights[static_cast<std::size_t>(j)] / total);
  }
  return BiphotonState(std::move(a), signal, idler);
}

BiphotonState make_source_state(const MeasurementModel& model, const ScanGeometry& scan,
                                int guard_bins) {
  model.validate();
  int pairs = model.passband_bins;
  if (pairs == 0) {
    if (guard_bins < 0) throw ConfigError("source state: guard bins must be >= 0");
    const int reach = std::max({std::abs(scan.signal_grid.first_index()),
                                std::abs(scan.signal_grid.last_index()),
                                std::abs(scan.idler_grid.first_index()),
                                std::abs(scan.idler_grid.last_index())}) +
                      guard_bins + 1;
    pairs = 2 * reach + 1;
  }
  const std::vector<double> flat(static_cast<std::size_t>(pairs), 1.0);
  return make_entangled_state(pairs, flat, scan.signal_grid.bin_spacing_hz());
}

BiphotonState apply_nonlocal_modulation(const BiphotonState& state,
                                        const SinusoidDrive& signal_drive,
                                        const SinusoidDrive& idler_drive,
                                        const TruncationPolicy& policy) {
  require_same_spacing(state.signal_grid(), signal_drive, "signal");
  require_same_spacing(state.idler_grid(), idler_drive, "idler");
  const auto vs = modeops::eopm_transform(signal_drive, state.signal_grid(), policy);
  const auto vi = modeops::eopm_transform(idler_drive, state.idler_grid(), policy);
  ComplexMatrix out = vs.matrix() * state.amplitude() * vi.matrix().transpose();
  return BiphotonState(std::move(out), vs.out_grid(), vi.out_grid());
}

JsiGrid simulate_jsi(const BiphotonState& state, const MeasurementModel& model,
                     double integration_s, const ScanGeometry& scan) {
  model.validate();
  if (!(integration_s > 0.0) || !std::isfinite(integration_s)) {
    throw ConfigError("jsi: integration time must be positive");
  }
  const double x = model.filter_crosstalk;
  const double kernel[3] = {x, 1.0 - 2.0 * x, x};
  const auto& sg = scan.signal_grid;
  const auto& ig = scan.idler_grid;

  Eigen::MatrixXd counts(sg.num_bins(), ig.num_bins());
  for (int r = 0; r < sg.num_bins(); ++r) {
    const int m = sg.absolute_index(r);
    for (int c = 0; c < ig.num_bins(); ++c) {
      const int k = ig.absolute_index(c);
      double p = 0.0;
      for (int a = -1; a <= 1; ++a) {
        for (int b = -1; b <= 1; ++b) {
          p += kernel[a + 1] * kernel[b + 1] * state.probability(m + a, k + b);
        }
      }
      counts(r, c) = model.flux_scale * integration_s * p + model.accidental_rate * integration_s;
    }
  }
  return JsiGrid(std::move(counts), sg, ig, scan.bin_width_hz, integration_s);
}

JsiGrid drift_averaged_jsi(const BiphotonState& state, const SinusoidDrive& signal_drive,
                           const SinusoidDrive& idler_drive, const DelayDistribution& dist,
                           const MeasurementModel& model, double integration_s,
                           int quad_points, const ScanGeometry& scan) {
  const auto nodes = dist.nodes(idler_drive.angular_frequency(), quad_points);
  const auto policy = TruncationPolicy::for_depth(
      std::max(signal_drive.depth_rad, idler_drive.depth_rad));
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(scan.signal_grid.num_bins(),
                                              scan.idler_grid.num_bins());
  for (const auto& node : nodes) {
    const auto evolved =
        apply_nonlocal_modulation(state, signal_drive, idler_drive.delayed(node.tau_s), policy);
    sum += node.weight * simulate_jsi(evolved, model, integration_s, scan).counts();
  }
  return JsiGrid(std::move(sum), scan.signal_grid, scan.idler_grid, scan.bin_width_hz,
                 integration_s);
}

std::vector<std::pair<int, double>> conditional_idler_spectrum(const BiphotonState& state,
                                                               int signal_bin) {
  const auto row = state.signal_grid().position_of(signal_bin);
  if (!row) throw ConfigError("conditional spectrum: signal bin outside the state");
  const auto& ig = state.idler_grid();
  double total = 0.0;
  std::vector<std::pair<int, double>> out;
  out.reserve(static_cast<std::size_t>(ig.num_bins()));
  for (int c = 0; c < ig.num_bins(); ++c) {
    const double p = std::norm(state.amplitude()(*row, c));
    out.emplace_back(ig.absolute_index(c), p);
    total += p;
  }
  if (total <= 0.0) throw DegenerateInputError("conditional spectrum: no coincidences in row");
  for (auto& entry : out) entry.second /= total;
  return out;
}

std::pair<SinusoidDrive, SinusoidDrive> drive_pair(DriveMode mode, const SinusoidDrive& base) {
  switch (mode) {
    case DriveMode::unmodulated: {
      SinusoidDrive off = base;
      off.depth_rad = 0.0;
      return {off, off};
    }
    case DriveMode::in_phase:
      return {base, base};
    case DriveMode::out_of_phase:
      return {base, base.out_of_phase()};
  }
  throw ConfigError("unknown drive mode");
}

FitResult fit_theory(const JsiGrid& measured, const JsiGrid& theory) {
  const auto& y = measured.counts();
  const auto& x = theory.counts();
  if (y.rows() != x.rows() || y.cols() != x.cols()) {
    throw ConfigError("fit: measured and theory grids differ in shape");
  }
  const auto n = static_cast<double>(x.size());
  if (x.size() < 2) throw DegenerateInputError("fit: need at least two bin pairs");

  const double mean_x = x.mean();
  const double mean_y = y.mean();
  const Eigen::ArrayXXd dx = x.array() - mean_x;
  const Eigen::ArrayXXd dy = y.array() - mean_y;
  const double sxx = (dx * dx).sum();
  const double scale_x = std::max(1.0, x.cwiseAbs().maxCoeff());
  if (sxx <= 1e-24 * scale_x * scale_x * n) {
    throw DegenerateInputError("fit: theory grid is constant, scale and offset are not separable");
  }
  FitResult fit{};
  fit.scale = (dx * dy).sum() / sxx;
  fit.offset = mean_y - fit.scale * mean_x;
  const Eigen::ArrayXXd resid = y.array() - fit.scale * x.array() - fit.offset;
  const double ssr = (resid * resid).sum();
  fit.residual_rms = std::sqrt(ssr / n);
  if (x.size() > 2) {
    const double s2 = ssr / (n - 2.0);
    fit.scale_stderr = std::sqrt(s2 / sxx);
    fit.offset_stderr = std::sqrt(s2 * (1.0 / n + mean_x * mean_x / sxx));
  } else {
    fit.scale_stderr = fit.offset_stderr = std::numeric_limits<double>::infinity();
  }
  return fit;
}

JsiGrid sample_counts(const JsiGrid& expected, std::uint64_t seed) {
  const auto& mean = expected.counts();
  Eigen::MatrixXd draws(mean.rows(), mean.cols());
  for (Eigen::Index r = 0; r < mean.rows(); ++r) {
    for (Eigen::Index c = 0; c < mean.cols(); ++c) {
      const double mu = mean(r, c);
      if (mu <= 0.0) {
        draws(r, c) = 0.0;
        continue;
      }
      const auto bin = static_cast<std::uint64_t>(r * mean.cols() + c);
      std::mt19937_64 rng(splitmix64(splitmix64(seed) ^ (bin + 1) * 0xD1B54A32D192ED03ULL));
      std::poisson_distribution<long long> poisson(mu);
      draws(r, c) = static_cast<double>(poisson(rng));
    }
  }
  return JsiGrid(std::move(draws), expected.signal_grid(), expected.idler_grid(),
                 expected.bin_width_hz(), expected.integration_s());
}

}  // namespace fbsync::biphoton
