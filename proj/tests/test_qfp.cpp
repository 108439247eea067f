#include <doctest.h>

#include <cmath>
#include <random>

#include "fbsync/error.hpp"
#include "fbsync/qfp.hpp"

using namespace fbsync;
using namespace fbsync::qfp;

namespace {
constexpr double kOmega = kTwoPi * 19e9;

double max_abs(const ComplexMatrix& m) { return m.cwiseAbs().maxCoeff(); }

// Direct evaluation of (1/d^4) sin^4(d x / 2) / sin^4(x / 2) away from its singularity.
double fejer_direct(int d, double x) {
  return std::pow(std::sin(d * x / 2) / std::sin(x / 2), 4) / std::pow(d, 4);
}
}  // namespace

TEST_CASE("DFT gates") {
  CHECK(std::abs(dft_matrix(1).entries()(0, 0) - Complex(1.0, 0.0)) < 1e-16);

  const auto w2 = dft_matrix(2).entries();
  ComplexMatrix h(2, 2);
  h << 1, 1, 1, -1;
  CHECK(max_abs(w2 - h / std::sqrt(2.0)) < 1e-15);

  for (int d = 1; d <= 10; ++d) {
    const auto w = dft_matrix(d);
    CHECK(w.is_unitary(1e-12));
    CHECK(w.entries().cwiseAbs2().maxCoeff() == doctest::Approx(1.0 / d));
  }
  CHECK_THROWS_AS(dft_matrix(0), ConfigError);
}

TEST_CASE("delay-shifted gates") {
  const auto w = dft_matrix(4);
  CHECK(max_abs(shifted_gate(w, 0.0).entries() - w.entries()) == 0.0);
  CHECK(max_abs(shifted_gate(w, kTwoPi).entries() - w.entries()) < 1e-14);
  CHECK(shifted_gate(w, 0.7).is_unitary());

  const auto w2 = dft_matrix(2);
  const auto s = shifted_gate(w2, kPi).entries();
  CHECK(std::abs(s(0, 0) - w2.entries()(0, 0)) < 1e-15);
  CHECK(std::abs(s(1, 1) - w2.entries()(1, 1)) < 1e-15);
  CHECK(std::abs(s(0, 1) + w2.entries()(0, 1)) < 1e-15);
  CHECK(std::abs(s(1, 0) + w2.entries()(1, 0)) < 1e-15);
}

TEST_CASE("matrix fidelity") {
  const auto w = dft_matrix(5);
  CHECK(matrix_fidelity(w, w) == doctest::Approx(1.0).epsilon(1e-15));
  for (double theta : {0.3, 1.7, -2.5}) {
    const GateMatrix rotated(std::polar(1.0, theta) * w.entries());
    CHECK(matrix_fidelity(w, rotated) == doctest::Approx(1.0).epsilon(1e-14));
  }
  CHECK(matrix_fidelity(dft_matrix(2), shifted_gate(dft_matrix(2), 0.02 * kPi)) ==
        doctest::Approx(0.9980).epsilon(5e-4));
  CHECK_THROWS_AS(matrix_fidelity(w, dft_matrix(4)), ConfigError);
  CHECK_THROWS_AS(matrix_fidelity(w, GateMatrix(ComplexMatrix::Zero(5, 5))), DegenerateInputError);
}

TEST_CASE("closed-form DFT fidelity") {
  for (int d = 1; d <= 10; ++d) CHECK(dft_fidelity_closed_form(d, 0.0) == 1.0);
  CHECK(dft_fidelity_closed_form(10, 0.02 * kPi) == doctest::Approx(0.936732803941407).epsilon(1e-12));
  CHECK(dft_fidelity_closed_form(2, 0.02 * kPi) == doctest::Approx(0.9980277018784457).epsilon(1e-12));
  CHECK(dft_fidelity_closed_form(2, 0.02 * kPi) == doctest::Approx(std::pow(std::cos(0.01 * kPi), 4)));

  SUBCASE("matches the direct trace formula") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> x_dist(-3 * kPi, 3 * kPi);
    for (int d = 1; d <= 10; ++d) {
      const auto w = dft_matrix(d);
      for (int i = 0; i < 1000; ++i) {
        const double x = x_dist(rng);
        CHECK(std::abs(dft_fidelity_closed_form(d, x) - matrix_fidelity(w, shifted_gate(w, x))) < 1e-12);
      }
    }
  }

  SUBCASE("removable singularity") {
    for (int d : {2, 5, 10}) {
      for (double eps : {1e-9, 1e-7, 1e-5}) {
        for (double centre : {0.0, kTwoPi, -kTwoPi}) {
          const double x = centre + eps;
          const auto w = dft_matrix(d);
          CHECK(std::abs(dft_fidelity_closed_form(d, x) - matrix_fidelity(w, shifted_gate(w, x))) < 1e-12);
        }
      }
    }
  }

  SUBCASE("periodic and small-angle bound") {
    for (int d = 2; d <= 10; ++d) {
      for (double x : {0.05, 0.4, 1.3}) {
        CHECK(dft_fidelity_closed_form(d, x) == doctest::Approx(dft_fidelity_closed_form(d, x + kTwoPi)).epsilon(1e-12));
        CHECK(dft_fidelity_closed_form(d, x) == doctest::Approx(fejer_direct(d, x)).epsilon(1e-12));
      }
      const double x = 0.01 / d;
      CHECK(dft_fidelity_closed_form(d, x) > 0.9999);
      CHECK(dft_fidelity_closed_form(d, x) ==
            doctest::Approx(1.0 - 2.0 * (d * d - 1.0) * (x / 2) * (x / 2) / 3.0).epsilon(1e-9));
    }
  }
}

TEST_CASE("maximum tolerable delay") {
  SUBCASE("d = 2 at the 0.9980 threshold") {
    const auto bound = max_tolerable_delay(2, 0.9980, kOmega);
    CHECK_FALSE(bound.saturated);
    CHECK(bound.tau_s == doctest::Approx(5.300021443362842e-13).epsilon(1e-11));
    CHECK(bound.tau_s > 0.50e-12);
    CHECK(bound.tau_s < 0.56e-12);
    CHECK(dft_fidelity_closed_form(2, kOmega * bound.tau_s) == doctest::Approx(0.998).epsilon(1e-12));
  }

  SUBCASE("threshold near one shrinks the bound to zero") {
    CHECK(max_tolerable_delay(4, 1.0 - 1e-14, kOmega).tau_s < 1e-18);
  }

  SUBCASE("decreasing in dimension, matching a brute-force scan") {
    // scipy brentq values for F = 0.99, d = 2..10
    const double ref[] = {1.1871071857742015e-12, 7.270278200764972e-13, 5.309616120893649e-13,
                          4.197672841284599e-13,  3.4760262210111147e-13, 2.968234003475886e-13,
                          2.590893505543436e-13,  2.2991938000817596e-13, 2.066824016494562e-13};
    double previous = 1.0;
    for (int d = 2; d <= 10; ++d) {
      const double tau = max_tolerable_delay(d, 0.99, kOmega).tau_s;
      CHECK(tau == doctest::Approx(ref[d - 2]).epsilon(1e-10));
      CHECK(tau < previous);
      previous = tau;
      // grid scan: every point below the bound meets the threshold
      for (int i = 0; i <= 200; ++i) {
        CHECK(dft_fidelity_closed_form(d, kOmega * tau * i / 200.0) >= 0.99 - 1e-12);
      }
    }
  }

  SUBCASE("d = 1 never degrades") {
    const auto bound = max_tolerable_delay(1, 0.5, kOmega);
    CHECK(bound.saturated);
    CHECK(bound.tau_s == doctest::Approx(1.0 / 19e9));
  }

  SUBCASE("invalid thresholds") {
    CHECK_THROWS_AS(max_tolerable_delay(2, 1.0, kOmega), ConfigError);
    CHECK_THROWS_AS(max_tolerable_delay(2, 0.0, kOmega), ConfigError);
    CHECK_THROWS_AS(max_tolerable_delay(2, 0.9, 0.0), ConfigError);
  }
}

TEST_CASE("density matrix validation") {
  CHECK(DensityMatrix::maximally_mixed(3).purity() == doctest::Approx(1.0 / 3));
  Eigen::VectorXcd psi(2);
  psi << 1.0, Complex(0.0, 1.0);
  CHECK(DensityMatrix::pure(psi).purity() == doctest::Approx(1.0));

  ComplexMatrix not_hermitian(2, 2);
  not_hermitian << 0.5, 0.1, 0.2, 0.5;
  CHECK_THROWS_AS(DensityMatrix{not_hermitian}, DomainError);
  ComplexMatrix bad_trace = ComplexMatrix::Identity(2, 2);
  CHECK_THROWS_AS(DensityMatrix{bad_trace}, DomainError);
  ComplexMatrix negative(2, 2);
  negative << 1.2, 0.0, 0.0, -0.2;
  CHECK_THROWS_AS(DensityMatrix{negative}, DomainError);
}

TEST_CASE("drift channel") {
  const auto w2 = dft_matrix(2);
  Eigen::VectorXcd plus(2);
  plus << 1.0, 1.0;
  const auto rho_plus = DensityMatrix::pure(plus);

  SUBCASE("point mass at zero is the unitary channel") {
    const auto sigma = drift_channel(rho_plus, w2, DelayDistribution::fixed(0.0), kOmega, 64);
    const ComplexMatrix expected = w2.entries() * rho_plus.entries() * w2.entries().adjoint();
    CHECK(max_abs(sigma.entries() - expected) < 1e-15);
    CHECK(std::abs(sigma.purity() - rho_plus.purity()) < 1e-12);
  }

  SUBCASE("maximally mixed input stays maximally mixed") {
    const auto mixed = DensityMatrix::maximally_mixed(2);
    const auto sigma = drift_channel(mixed, w2, DelayDistribution::uniform_over_period(), kOmega, 128);
    CHECK(max_abs(sigma.entries() - mixed.entries()) < 1e-15);
  }

  SUBCASE("uniform drift matches the analytic phase average") {
    const auto sigma = drift_channel(rho_plus, w2, DelayDistribution::uniform_over_period(), kOmega, 256);
    // Average of exp(i (a - c - b + e) x) over a full period keeps only a - c = b - e.
    const auto& w = w2.entries();
    const auto& rho = rho_plus.entries();
    ComplexMatrix expected = ComplexMatrix::Zero(2, 2);
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        for (int c = 0; c < 2; ++c)
          for (int e = 0; e < 2; ++e)
            if (a - c == b - e) expected(a, b) += w(a, c) * rho(c, e) * std::conj(w(b, e));
    CHECK(max_abs(sigma.entries() - expected) < 1e-12);
    CHECK(sigma.purity() < rho_plus.purity());
  }

  SUBCASE("outputs are valid for every distribution") {
    const auto w = dft_matrix(5);
    Eigen::VectorXcd psi(5);
    psi << 1.0, Complex(0.3, 0.2), -0.5, Complex(0.0, 1.0), 0.25;
    const auto rho = DensityMatrix::pure(psi);
    const DelayDistribution dists[] = {DelayDistribution::fixed(1.3e-12),
                                       DelayDistribution::uniform_over_period(),
                                       DelayDistribution::gaussian(0.0, 2e-12),
                                       DelayDistribution::empirical({0.1e-12, 0.4e-12, -0.3e-12})};
    for (const auto& dist : dists) {
      const auto sigma = drift_channel(rho, w, dist, kOmega, 64);
      CHECK(max_abs(sigma.entries() - sigma.entries().adjoint()) < 1e-12);
      CHECK(std::abs(sigma.entries().trace() - Complex(1.0, 0.0)) < 1e-12);
      CHECK(sigma.min_eigenvalue() >= -1e-10);
    }
  }

  SUBCASE("linearity") {
    const auto w = dft_matrix(3);
    Eigen::VectorXcd a(3), b(3);
    a << 1.0, 0.0, Complex(0.0, 1.0);
    b << 0.2, 1.0, -0.4;
    const auto r1 = DensityMatrix::pure(a);
    const auto r2 = DensityMatrix::pure(b);
    const double alpha = 0.3;
    const DensityMatrix mix(alpha * r1.entries() + (1 - alpha) * r2.entries());
    const auto dist = DelayDistribution::gaussian(0.5e-12, 1e-12);
    const auto lhs = drift_channel(mix, w, dist, kOmega, 64).entries();
    const ComplexMatrix rhs = alpha * drift_channel(r1, w, dist, kOmega, 64).entries() +
                              (1 - alpha) * drift_channel(r2, w, dist, kOmega, 64).entries();
    CHECK(max_abs(lhs - rhs) < 1e-12);
  }

  SUBCASE("dimension mismatch") {
    CHECK_THROWS_AS(drift_channel(DensityMatrix::maximally_mixed(3), w2, DelayDistribution::fixed(0.0),
                                  kOmega, 8),
                    ConfigError);
  }
}
