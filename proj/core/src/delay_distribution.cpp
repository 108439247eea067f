#include "fbsync/delay_distribution.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include <Eigen/Eigenvalues>

#include "fbsync/error.hpp"
#include "fbsync/modeops.hpp"

namespace fbsync {

DelayDistribution::DelayDistribution(Kind kind, double location, double sigma,
                                     std::vector<double> samples)
    : kind_(kind), location_s_(location), sigma_s_(sigma), samples_s_(std::move(samples)) {}

DelayDistribution DelayDistribution::fixed(double tau_s) {
  if (!std::isfinite(tau_s)) throw ConfigError("delay distribution: fixed delay must be finite");
  return DelayDistribution(Kind::fixed, tau_s, 0.0, {});
}

DelayDistribution DelayDistribution::uniform_over_period(double start_s) {
  if (!std::isfinite(start_s)) throw ConfigError("delay distribution: start must be finite");
  return DelayDistribution(Kind::uniform_over_period, start_s, 0.0, {});
}

DelayDistribution DelayDistribution::gaussian(double mean_s, double sigma_s) {
  if (!std::isfinite(mean_s) || !std::isfinite(sigma_s) || sigma_s < 0.0) {
    throw ConfigError("delay distribution: gaussian needs finite mean and sigma >= 0");
  }
  return DelayDistribution(Kind::gaussian, mean_s, sigma_s, {});
}

DelayDistribution DelayDistribution::empirical(std::vector<double> samples_s) {
  if (samples_s.empty()) throw ConfigError("delay distribution: empirical sample list is empty");
  for (double s : samples_s) {
    if (!std::isfinite(s)) throw ConfigError("delay distribution: non-finite sample");
  }
  return DelayDistribution(Kind::empirical, 0.0, 0.0, std::move(samples_s));
}

int DelayDistribution::default_points() const noexcept {
  switch (kind_) {
    case Kind::uniform_over_period: return kDefaultUniformPoints;
    case Kind::gaussian: return kDefaultGaussianPoints;
    default: return 1;
  }
}

std::vector<QuadratureNode> DelayDistribution::nodes(double omega, int quad_points) const {
  if (quad_points < 1) throw ConfigError("delay distribution: quad_points must be >= 1");
  std::vector<QuadratureNode> out;
  switch (kind_) {
    case Kind::fixed:
      out.push_back({location_s_, 1.0});
      break;
    case Kind::uniform_over_period: {
      if (!(omega > 0.0)) throw ConfigError("delay distribution: omega must be positive");
      const double period = kTwoPi / omega;
      out.reserve(static_cast<std::size_t>(quad_points));
      for (int j = 0; j < quad_points; ++j) {
        out.push_back({location_s_ + (j + 0.5) * period / quad_points, 1.0 / quad_points});
      }
      break;
    }
    case Kind::gaussian: {
      const double inv_sqrt_pi = 1.0 / std::sqrt(kPi);
      for (const auto& node : gauss_hermite_rule(quad_points)) {
        out.push_back({location_s_ + std::sqrt(2.0) * sigma_s_ * node.tau_s,
                       node.weight * inv_sqrt_pi});
      }
      break;
    }
    case Kind::empirical:
      for (double s : samples_s_) out.push_back({s, 1.0 / static_cast<double>(samples_s_.size())});
      break;
  }

  const double total = std::accumulate(out.begin(), out.end(), 0.0,
                                       [](double acc, const QuadratureNode& n) {
                                         return acc + n.weight;
                                       });
  if (!(total > 0.0) || !std::isfinite(total)) {
    throw DomainError("delay distribution: weights are not normalizable on the quadrature support");
  }
  for (auto& node : out) node.weight /= total;
  return out;
}

std::string_view to_string(DelayDistribution::Kind kind) noexcept {
  switch (kind) {
    case DelayDistribution::Kind::fixed: return "fixed";
    case DelayDistribution::Kind::uniform_over_period: return "uniform_over_period";
    case DelayDistribution::Kind::gaussian: return "gaussian";
    case DelayDistribution::Kind::empirical: return "empirical";
  }
  return "unknown";
}

DelayDistribution::Kind parse_delay_kind(std::string_view name) {
  if (name == "fixed" || name == "none") return DelayDistribution::Kind::fixed;
  if (name == "uniform_over_period" || name == "uniform") {
    return DelayDistribution::Kind::uniform_over_period;
  }
  if (name == "gaussian") return DelayDistribution::Kind::gaussian;
  if (name == "empirical") return DelayDistribution::Kind::empirical;
  throw ConfigError("unsupported delay distribution kind '" + std::string(name) + "'");
}

std::vector<QuadratureNode> gauss_hermite_rule(int n) {
  if (n < 1) throw ConfigError("gauss-hermite: need at least one node");
  // Jacobi matrix of the physicists' Hermite recurrence.
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const double b = std::sqrt(0.5 * k);
    jacobi(k, k - 1) = b;
    jacobi(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
  const auto& x = solver.eigenvalues();
  const auto& v = solver.eigenvectors();
  const double mu0 = std::sqrt(kPi);
  std::vector<QuadratureNode> rule(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    rule[static_cast<std::size_t>(k)] = {x(k), mu0 * v(0, k) * v(0, k)};
  }
  return rule;
}

}  // namespace fbsync
