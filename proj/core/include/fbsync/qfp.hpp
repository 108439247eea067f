#pragma once

// Quantum-frequency-processor gates under RF delay. Delaying every drive of a
// processor by tau multiplies element (m, n) of its matrix by
// exp(i (m - n) Omega tau); everything here is built on that rule.

#include "fbsync/delay_distribution.hpp"
#include "fbsync/modeops.hpp"

namespace fbsync::qfp {

/// d x d complex gate on bins 0..d-1.
class GateMatrix {
 public:
  explicit GateMatrix(ComplexMatrix entries);

  int dim() const noexcept { return static_cast<int>(entries_.rows()); }
  const ComplexMatrix& entries() const noexcept { return entries_; }
  bool is_unitary(double tol = 1e-12) const;

 private:
  ComplexMatrix entries_;
};

/// Qudit state; construction checks Hermiticity and unit trace to 1e-12 and
/// the smallest eigenvalue against -1e-10.
class DensityMatrix {
 public:
  static constexpr double kHermitianTol = 1e-12;
  static constexpr double kTraceTol = 1e-12;
  static constexpr double kEigenFloor = -1e-10;

  explicit DensityMatrix(ComplexMatrix entries);

  static DensityMatrix maximally_mixed(int d);
  /// |psi><psi| for a normalised copy of psi.
  static DensityMatrix pure(const Eigen::VectorXcd& psi);

  int dim() const noexcept { return static_cast<int>(entries_.rows()); }
  const ComplexMatrix& entries() const noexcept { return entries_; }
  double purity() const;
  double min_eigenvalue() const;

 private:
  ComplexMatrix entries_;
};

/// W_mn = exp(2 pi i m n / d) / sqrt(d).
GateMatrix dft_matrix(int d);

/// W~_mn = exp(i (m - n) omega_tau) W_mn.
GateMatrix shifted_gate(const GateMatrix& gate, double omega_tau);

/// |Tr A^dag W|^2 / (Tr A^dag A Tr W^dag W).
double matrix_fidelity(const GateMatrix& ideal, const GateMatrix& actual);

/// Fidelity of a delay-shifted d-point DFT, (sin(d x/2) / (d sin(x/2)))^4 with
/// x = omega_tau; the removable singularity at x = 0 mod 2 pi evaluates to 1.
double dft_fidelity_closed_form(int d, double omega_tau);

struct DelayBound {
  double tau_s;
  bool saturated;  // threshold never reached on the first lobe; tau_s is the lobe edge
};

/// Largest tau with fidelity >= threshold on all of [0, tau].
DelayBound max_tolerable_delay(int d, double threshold, double omega);

/// sigma = sum_j w_j W~(tau_j) rho W~(tau_j)^dag over the law's quadrature nodes.
DensityMatrix drift_channel(const DensityMatrix& rho, const GateMatrix& gate,
                            const DelayDistribution& dist, double omega, int quad_points);

}  // namespace fbsync::qfp
