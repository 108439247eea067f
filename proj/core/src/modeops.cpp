#include "fbsync/modeops.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "fbsync/error.hpp"

namespace fbsync::modeops {

namespace {

bool close_relative(double a, double b, double rtol) {
  return std::abs(a - b) <= rtol * std::max(std::abs(a), std::abs(b));
}

std::string describe(const FrequencyGrid& g) {
  std::ostringstream os;
  os << "[" << g.first_index() << ".." << g.last_index() << "] @ " << g.bin_spacing_hz()
     << " Hz";
  return os.str();
}

}  // namespace

FrequencyGrid::FrequencyGrid(double bin_spacing_hz, int num_bins, int index_offset)
    : spacing_hz_(bin_spacing_hz), num_bins_(num_bins), offset_(index_offset) {
  if (!(bin_spacing_hz > 0.0) || !std::isfinite(bin_spacing_hz)) {
    throw ConfigError("frequency grid: bin spacing must be positive and finite");
  }
  if (num_bins < 1) {
    throw ConfigError("frequency grid: num_bins must be at least 1");
  }
}

FrequencyGrid FrequencyGrid::centered(double bin_spacing_hz, int num_bins) {
  return FrequencyGrid(bin_spacing_hz, num_bins, -(num_bins / 2));
}

std::optional<int> FrequencyGrid::position_of(int absolute) const noexcept {
  if (!contains(absolute)) return std::nullopt;
  return absolute - offset_;
}

FrequencyGrid FrequencyGrid::extended(int guard) const {
  if (guard < 0) throw ConfigError("frequency grid: guard bins must be nonnegative");
  return FrequencyGrid(spacing_hz_, num_bins_ + 2 * guard, offset_ - guard);
}

bool FrequencyGrid::same_bins(const FrequencyGrid& other) const noexcept {
  return num_bins_ == other.num_bins_ && offset_ == other.offset_ &&
         close_relative(spacing_hz_, other.spacing_hz_, 1e-9);
}

void SinusoidDrive::validate() const {
  if (!(rf_frequency_hz > 0.0) || !std::isfinite(rf_frequency_hz)) {
    throw ConfigError("drive: rf_frequency_hz must be positive and finite");
  }
  if (!(depth_rad >= 0.0) || !std::isfinite(depth_rad)) {
    throw ConfigError("drive: depth_rad must be nonnegative and finite");
  }
  if (!std::isfinite(delay_s) || !std::isfinite(phase_rad)) {
    throw ConfigError("drive: delay and phase must be finite");
  }
}

double SinusoidDrive::phase_at(double t) const noexcept {
  return depth_rad * std::sin(angular_frequency() * (t - delay_s) + phase_rad);
}

SinusoidDrive SinusoidDrive::delayed(double extra_delay_s) const noexcept {
  SinusoidDrive d = *this;
  d.delay_s += extra_delay_s;
  return d;
}

SinusoidDrive SinusoidDrive::out_of_phase() const noexcept {
  SinusoidDrive d = *this;
  d.phase_rad += kPi;
  return d;
}

TruncationPolicy TruncationPolicy::for_depth(double depth_rad, double coefficient_floor) {
  if (!(depth_rad >= 0.0) || !std::isfinite(depth_rad)) {
    throw ConfigError("truncation policy: depth must be nonnegative and finite");
  }
  if (!(coefficient_floor > 0.0)) {
    throw ConfigError("truncation policy: coefficient floor must be positive");
  }
  int guard = static_cast<int>(std::ceil(depth_rad)) + 8;
  // Beyond order ~depth the Bessel magnitudes fall monotonically.
  while (depth_rad > 0.0 &&
         std::abs(std::cyl_bessel_j(static_cast<double>(guard + 1), depth_rad)) >=
             coefficient_floor) {
    ++guard;
  }
  return TruncationPolicy{guard, coefficient_floor};
}

ModeTransform::ModeTransform(ComplexMatrix matrix, FrequencyGrid in_grid,
                             FrequencyGrid out_grid)
    : matrix_(std::move(matrix)), in_grid_(in_grid), out_grid_(out_grid) {
  if (matrix_.rows() != out_grid_.num_bins() || matrix_.cols() != in_grid_.num_bins()) {
    throw ConfigError("mode transform: matrix shape does not match its grids");
  }
}

Complex ModeTransform::element(int out_index, int in_index) const {
  const auto row = out_grid_.position_of(out_index);
  const auto col = in_grid_.position_of(in_index);
  if (!row || !col) return {};
  return matrix_(*row, *col);
}

ModeTransform ModeTransform::restricted(const FrequencyGrid& out_grid,
                                        const FrequencyGrid& in_grid) const {
  const auto row0 = out_grid_.position_of(out_grid.first_index());
  const auto col0 = in_grid_.position_of(in_grid.first_index());
  if (!row0 || !col0 || !out_grid_.contains(out_grid.last_index()) ||
      !in_grid_.contains(in_grid.last_index())) {
    throw CompositionError("mode transform: restriction grids fall outside the transform");
  }
  ComplexMatrix block =
      matrix_.block(*row0, *col0, out_grid.num_bins(), in_grid.num_bins());
  return ModeTransform(std::move(block), in_grid, out_grid);
}

Coefficients::Coefficients(int max_order, std::vector<Complex> values)
    : max_order_(max_order), values_(std::move(values)) {
  if (max_order_ < 0 || values_.size() != static_cast<std::size_t>(2 * max_order_ + 1)) {
    throw ConfigError("coefficients: expected 2*max_order+1 values");
  }
}

Complex Coefficients::operator[](int k) const noexcept {
  if (k < -max_order_ || k > max_order_) return {};
  return values_[static_cast<std::size_t>(k + max_order_)];
}

double Coefficients::captured_power() const noexcept {
  double total = 0.0;
  for (const auto& c : values_) total += std::norm(c);
  return total;
}

Coefficients phase_fourier_coefficients(const std::function<double(double)>& phase,
                                        double period_s, int max_order, int samples) {
  if (max_order < 0) throw ConfigError("coefficients: max_order must be nonnegative");
  if (samples < 2 * max_order + 1) {
    throw ConfigError("coefficients: too few samples for the requested orders");
  }
  const auto n = static_cast<std::size_t>(samples);
  std::vector<Complex> field(n);
  std::vector<Complex> roots(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double t = period_s * static_cast<double>(j) / static_cast<double>(n);
    field[j] = std::polar(1.0, phase(t));
    roots[j] = std::polar(1.0, kTwoPi * static_cast<double>(j) / static_cast<double>(n));
  }

  std::vector<Complex> values(static_cast<std::size_t>(2 * max_order + 1));
  for (int k = -max_order; k <= max_order; ++k) {
    // exp(i k Omega t_j) = roots[(k j) mod n]
    const std::size_t step = static_cast<std::size_t>(((k % samples) + samples) % samples);
    std::size_t idx = 0;
    Complex acc{};
    for (std::size_t j = 0; j < n; ++j) {
      acc += field[j] * roots[idx];
      idx += step;
      if (idx >= n) idx -= n;
    }
    values[static_cast<std::size_t>(k + max_order)] = acc / static_cast<double>(n);
  }
  return Coefficients(max_order, std::move(values));
}

Coefficients eopm_coefficients(const SinusoidDrive& drive, int max_order,
                               double coefficient_floor) {
  drive.validate();
  if (max_order < 0) throw ConfigError("eopm coefficients: max_order must be nonnegative");
  auto coeffs = phase_fourier_coefficients(
      [&drive](double t) { return drive.phase_at(t); }, drive.period_s(), max_order);
  if (coeffs.captured_power() < 1.0 - coefficient_floor) {
    std::ostringstream os;
    os << "eopm coefficients: orders |k| <= " << max_order << " capture only "
       << coeffs.captured_power() << " of the power at depth " << drive.depth_rad;
    throw TruncationError(os.str());
  }
  return coeffs;
}

ModeTransform eopm_transform(const SinusoidDrive& drive, const FrequencyGrid& in_grid,
                             const TruncationPolicy& policy) {
  drive.validate();
  if (!close_relative(in_grid.bin_spacing_hz(), drive.rf_frequency_hz, 1e-9)) {
    std::ostringstream os;
    os << "eopm transform: grid spacing " << in_grid.bin_spacing_hz()
       << " Hz differs from RF frequency " << drive.rf_frequency_hz << " Hz";
    throw ConfigError(os.str());
  }
  if (policy.guard_bins < 0) throw ConfigError("eopm transform: negative guard bins");

  const FrequencyGrid out_grid = in_grid.extended(policy.guard_bins);
  const int max_order = in_grid.num_bins() - 1 + policy.guard_bins;
  const auto coeffs = eopm_coefficients(drive, max_order, policy.coefficient_floor);

  ComplexMatrix v(out_grid.num_bins(), in_grid.num_bins());
  for (int col = 0; col < in_grid.num_bins(); ++col) {
    const int n = in_grid.absolute_index(col);
    for (int row = 0; row < out_grid.num_bins(); ++row) {
      v(row, col) = coeffs[out_grid.absolute_index(row) - n];
    }
  }
  return ModeTransform(std::move(v), in_grid, out_grid);
}

ModeTransform pulse_shaper_transform(std::span<const Complex> mask, const FrequencyGrid& grid) {
  if (mask.size() != static_cast<std::size_t>(grid.num_bins())) {
    throw ConfigError("pulse shaper: mask length must equal the number of bins");
  }
  ComplexMatrix v = ComplexMatrix::Zero(grid.num_bins(), grid.num_bins());
  for (int k = 0; k < grid.num_bins(); ++k) {
    const Complex t = mask[static_cast<std::size_t>(k)];
    if (!std::isfinite(t.real()) || !std::isfinite(t.imag()) || std::abs(t) > 1.0 + 1e-12) {
      std::ostringstream os;
      os << "pulse shaper: nonphysical gain |t| = " << std::abs(t) << " at bin "
         << grid.absolute_index(k);
      throw ConfigError(os.str());
    }
    v(k, k) = t;
  }
  return ModeTransform(std::move(v), grid, grid);
}

std::vector<Complex> bandpass_mask(const FrequencyGrid& grid, double bandwidth_hz,
                                   double center_hz) {
  if (!(bandwidth_hz >= 0.0)) throw ConfigError("bandpass: bandwidth must be nonnegative");
  const double half = 0.5 * bandwidth_hz;
  // Slack keeps bins sitting exactly on an edge inside despite rounding.
  const double slack = 1e-9 * grid.bin_spacing_hz();
  std::vector<Complex> mask(static_cast<std::size_t>(grid.num_bins()));
  for (int k = 0; k < grid.num_bins(); ++k) {
    const bool pass = std::abs(grid.offset_hz(k) - center_hz) <= half + slack;
    mask[static_cast<std::size_t>(k)] = pass ? 1.0 : 0.0;
  }
  return mask;
}

std::vector<Complex> quadratic_phase_mask(const FrequencyGrid& grid, double curvature_rad) {
  std::vector<Complex> mask(static_cast<std::size_t>(grid.num_bins()));
  for (int k = 0; k < grid.num_bins(); ++k) {
    const double m = grid.absolute_index(k);
    mask[static_cast<std::size_t>(k)] = std::polar(1.0, curvature_rad * m * m);
  }
  return mask;
}

ModeTransform cascade(std::span<const ModeTransform> stages) {
  if (stages.empty()) throw CompositionError("cascade: no stages");
  ComplexMatrix total = stages.front().matrix();
  for (std::size_t q = 1; q < stages.size(); ++q) {
    const auto& prev = stages[q - 1];
    const auto& next = stages[q];
    if (!prev.out_grid().same_bins(next.in_grid())) {
      std::ostringstream os;
      os << "cascade: stage " << q - 1 << " output grid " << describe(prev.out_grid())
         << " does not match stage " << q << " input grid " << describe(next.in_grid());
      throw CompositionError(os.str());
    }
    total = next.matrix() * total;
  }
  return ModeTransform(std::move(total), stages.front().in_grid(), stages.back().out_grid());
}

ModeTransform delay_shift(const ModeTransform& transform, double tau_s, double omega) {
  if (!(omega > 0.0)) throw ConfigError("delay shift: omega must be positive");
  for (const auto* g : {&transform.in_grid(), &transform.out_grid()}) {
    if (!close_relative(g->bin_spacing_hz() * kTwoPi, omega, 1e-9)) {
      throw ConfigError("delay shift: grid spacing does not match omega / 2pi");
    }
  }
  ComplexMatrix w = transform.matrix();
  const auto& in = transform.in_grid();
  const auto& out = transform.out_grid();
  for (int col = 0; col < in.num_bins(); ++col) {
    for (int row = 0; row < out.num_bins(); ++row) {
      const double k = out.absolute_index(row) - in.absolute_index(col);
      w(row, col) *= std::polar(1.0, k * omega * tau_s);
    }
  }
  return ModeTransform(std::move(w), in, out);
}

}  // namespace fbsync::modeops
