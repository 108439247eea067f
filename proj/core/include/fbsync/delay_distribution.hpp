#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace fbsync {

struct QuadratureNode {
  double tau_s;
  double weight;
};

inline constexpr int kDefaultUniformPoints = 128;
inline constexpr int kDefaultGaussianPoints = 64;

/// Law f(tau) of a fluctuating RF delay.
class DelayDistribution {
 public:
  enum class Kind { fixed, uniform_over_period, gaussian, empirical };

  static DelayDistribution fixed(double tau_s);
  /// Uniform over [start_s, start_s + T), T taken from the RF frequency at evaluation.
  static DelayDistribution uniform_over_period(double start_s = 0.0);
  static DelayDistribution gaussian(double mean_s, double sigma_s);
  static DelayDistribution empirical(std::vector<double> samples_s);

  Kind kind() const noexcept { return kind_; }
  /// Fixed value, uniform start, or gaussian mean.
  double location_s() const noexcept { return location_s_; }
  double sigma_s() const noexcept { return sigma_s_; }
  const std::vector<double>& samples_s() const noexcept { return samples_s_; }

  /// Quadrature nodes with weights summing to 1. Uniform laws use the
  /// midpoint rule on `quad_points` nodes, gaussian laws Gauss-Hermite on
  /// `quad_points` nodes; fixed and empirical laws ignore `quad_points`.
  std::vector<QuadratureNode> nodes(double omega, int quad_points) const;

  /// Default node count for this kind (128 uniform, 64 gaussian, else 1).
  int default_points() const noexcept;

 private:
  DelayDistribution(Kind kind, double location, double sigma, std::vector<double> samples);

  Kind kind_;
  double location_s_;
  double sigma_s_;
  std::vector<double> samples_s_;
};

std::string_view to_string(DelayDistribution::Kind kind) noexcept;
DelayDistribution::Kind parse_delay_kind(std::string_view name);

/// Gauss-Hermite rule for int exp(-x^2) g(x) dx (Golub-Welsch).
std::vector<QuadratureNode> gauss_hermite_rule(int n);

}  // namespace fbsync
