#include "fbsync/qfp.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "fbsync/error.hpp"

namespace fbsync::qfp {

GateMatrix::GateMatrix(ComplexMatrix entries) : entries_(std::move(entries)) {
  if (entries_.rows() < 1 || entries_.rows() != entries_.cols()) {
    throw ConfigError("gate: matrix must be square and nonempty");
  }
  if (!entries_.allFinite()) throw ConfigError("gate: non-finite entries");
}

bool GateMatrix::is_unitary(double tol) const {
  const ComplexMatrix gram = entries_.adjoint() * entries_;
  return (gram - ComplexMatrix::Identity(dim(), dim())).cwiseAbs().maxCoeff() < tol;
}

DensityMatrix::DensityMatrix(ComplexMatrix entries) : entries_(std::move(entries)) {
  if (entries_.rows() < 1 || entries_.rows() != entries_.cols()) {
    throw ConfigError("density matrix: must be square and nonempty");
  }
  if (!entries_.allFinite()) throw ConfigError("density matrix: non-finite entries");
  const double herm = (entries_ - entries_.adjoint()).cwiseAbs().maxCoeff();
  if (herm > kHermitianTol) {
    std::ostringstream os;
    os << "density matrix: not Hermitian (deviation " << herm << ")";
    throw DomainError(os.str());
  }
  const Complex tr = entries_.trace();
  if (std::abs(tr - Complex(1.0, 0.0)) > kTraceTol) {
    std::ostringstream os;
    os << "density matrix: trace " << tr.real() << " differs from 1";
    throw DomainError(os.str());
  }
  const double lambda = min_eigenvalue();
  if (lambda < kEigenFloor) {
    std::ostringstream os;
    os << "density matrix: negative eigenvalue " << lambda;
    throw DomainError(os.str());
  }
}

DensityMatrix DensityMatrix::maximally_mixed(int d) {
  if (d < 1) throw ConfigError("density matrix: dimension must be >= 1");
  return DensityMatrix(ComplexMatrix::Identity(d, d) / static_cast<double>(d));
}

DensityMatrix DensityMatrix::pure(const Eigen::VectorXcd& psi) {
  const double n = psi.norm();
  if (!(n > 0.0)) throw ConfigError("density matrix: zero state vector");
  const Eigen::VectorXcd unit = psi / n;
  return DensityMatrix(unit * unit.adjoint());
}

double DensityMatrix::purity() const { return (entries_ * entries_).trace().real(); }

double DensityMatrix::min_eigenvalue() const {
  // Eigen reads only the lower triangle, so symmetrise first.
  const ComplexMatrix h = 0.5 * (entries_ + entries_.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

GateMatrix dft_matrix(int d) {
  if (d < 1) throw ConfigError("dft: dimension must be >= 1");
  ComplexMatrix w(d, d);
  const double norm = 1.0 / std::sqrt(static_cast<double>(d));
  for (int m = 0; m < d; ++m) {
    for (int n = 0; n < d; ++n) {
      // m n reduced mod d keeps the angle small for large d.
      const int k = (m * n) % d;
      w(m, n) = std::polar(norm, kTwoPi * k / d);
    }
  }
  return GateMatrix(std::move(w));
}

GateMatrix shifted_gate(const GateMatrix& gate, double omega_tau) {
  ComplexMatrix w = gate.entries();
  for (int m = 0; m < gate.dim(); ++m) {
    for (int n = 0; n < gate.dim(); ++n) w(m, n) *= std::polar(1.0, (m - n) * omega_tau);
  }
  return GateMatrix(std::move(w));
}

double matrix_fidelity(const GateMatrix& ideal, const GateMatrix& actual) {
  if (ideal.dim() != actual.dim()) throw ConfigError("fidelity: gate dimensions differ");
  const auto& w = ideal.entries();
  const auto& a = actual.entries();
  const double ww = w.squaredNorm();
  const double aa = a.squaredNorm();
  if (!(ww > 0.0) || !(aa > 0.0)) {
    throw DegenerateInputError("fidelity: zero-norm gate");
  }
  // Tr A^dag W = sum conj(A_mn) W_mn
  const Complex overlap = (a.conjugate().array() * w.array()).sum();
  return std::norm(overlap) / (aa * ww);
}

double dft_fidelity_closed_form(int d, double omega_tau) {
  if (d < 1) throw ConfigError("dft fidelity: dimension must be >= 1");
  // The kernel has period pi in half; reduce against an extended-precision pi.
  constexpr long double pi = std::numbers::pi_v<long double>;
  const long double half = 0.5L * static_cast<long double>(omega_tau);
  const long double e = half - std::nearbyint(half / pi) * pi;
  const long double s = std::sin(e);
  double ratio;
  if (std::abs(s) < 1e-8L) {
    ratio = static_cast<double>(1.0L - (static_cast<long double>(d) * d - 1.0L) * e * e / 6.0L);
  } else {
    ratio = static_cast<double>(std::sin(d * e) / (d * s));
  }
  const double r2 = ratio * ratio;
  return r2 * r2;
}

DelayBound max_tolerable_delay(int d, double threshold, double omega) {
  if (d < 1) throw ConfigError("max delay: dimension must be >= 1");
  if (!(threshold > 0.0) || !(threshold < 1.0)) {
    throw ConfigError("max delay: threshold must lie in (0, 1)");
  }
  if (!(omega > 0.0) || !std::isfinite(omega)) throw ConfigError("max delay: omega must be positive");

  // First lobe of the Fejer-type kernel ends at its first zero, x = 2 pi / d.
  const double edge = kTwoPi / d;
  if (d == 1 || dft_fidelity_closed_form(d, edge) >= threshold) {
    return {edge / omega, true};
  }
  double lo = 0.0;
  double hi = edge;
  while (hi - lo > 1e-13 * hi) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (dft_fidelity_closed_form(d, mid) >= threshold) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return {lo / omega, false};
}

DensityMatrix drift_channel(const DensityMatrix& rho, const GateMatrix& gate,
                            const DelayDistribution& dist, double omega, int quad_points) {
  if (rho.dim() != gate.dim()) throw ConfigError("drift channel: state and gate dimensions differ");
  if (!(omega > 0.0)) throw ConfigError("drift channel: omega must be positive");
  const auto nodes = dist.nodes(omega, quad_points);
  ComplexMatrix sigma = ComplexMatrix::Zero(rho.dim(), rho.dim());
  for (const auto& node : nodes) {
    const ComplexMatrix w = shifted_gate(gate, omega * node.tau_s).entries();
    sigma += node.weight * (w * rho.entries() * w.adjoint());
  }
  return DensityMatrix(std::move(sigma));
}

}  // namespace fbsync::qfp
