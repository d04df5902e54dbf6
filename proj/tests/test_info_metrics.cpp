#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "qfb/info_metrics.hpp"

using namespace qfb;

namespace {

DensityMatrix diag2(double p) {
  CMatrix m = CMatrix::Zero(2, 2);
  m(0, 0) = p;
  m(1, 1) = 1.0 - p;
  return DensityMatrix({2}, m);
}

DensityMatrix random_mixed(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  CMatrix a(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) a(i, j) = Complex(g(rng), g(rng));
  CMatrix rho = a * a.adjoint();
  rho /= rho.trace().real();
  return DensityMatrix({d}, rho);
}

}  // namespace

TEST_CASE("entropy of simple spectra in nats") {
  CHECK(von_neumann_entropy(diag2(0.75)) == doctest::Approx(0.5623351446188083).epsilon(1e-12));
  CHECK(von_neumann_entropy(diag2(0.5)) == doctest::Approx(std::log(2.0)).epsilon(1e-14));
  CHECK(von_neumann_entropy(diag2(1.0)) == 0.0);
  CHECK(von_neumann_entropy(DensityMatrix({3}, CMatrix::Identity(3, 3) / 3.0)) ==
        doctest::Approx(std::log(3.0)).epsilon(1e-14));
}

TEST_CASE("entropy is unitarily invariant and bounded by ln d") {
  std::mt19937_64 rng(9);
  for (int rep = 0; rep < 20; ++rep) {
    const auto rho = random_mixed(4, rng);
    const double s = von_neumann_entropy(rho);
    CHECK(s >= 0.0);
    CHECK(s <= std::log(4.0) + 1e-12);
    const CMatrix u = Eigen::HouseholderQR<CMatrix>(random_mixed(4, rng).matrix()).householderQ();
    const DensityMatrix rotated({4}, u * rho.matrix() * u.adjoint());
    CHECK(von_neumann_entropy(rotated) == doctest::Approx(s).epsilon(1e-11));
  }
}

TEST_CASE("KL divergence: closed-form values") {
  // D(I/2 || diag(1/8, 7/8)) = ln(1/2) - (ln(1/8) + ln(7/8)) / 2.
  const double expected = std::log(0.5) - 0.5 * (std::log(1.0 / 8.0) + std::log(7.0 / 8.0));
  CHECK(*kl_divergence(diag2(0.5), diag2(1.0 / 8.0)).value == doctest::Approx(expected).epsilon(1e-12));
  CHECK(std::abs(expected - std::log(4.0 / std::sqrt(7.0))) < 1e-14);
  // A pure state against the maximally mixed state: D = ln d.
  CHECK(*kl_divergence(diag2(1.0), diag2(0.5)).value == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  // Self-divergence vanishes.
  CHECK(std::abs(*kl_divergence(diag2(0.3), diag2(0.3)).value) < 1e-14);
}

TEST_CASE("KL divergence is infinite outside the support") {
  const auto d = kl_divergence(diag2(0.5), diag2(1.0));
  CHECK(d.infinite());
  // Inside the support it stays finite even when sigma is rank deficient.
  const auto ok = kl_divergence(diag2(1.0), diag2(1.0));
  REQUIRE_FALSE(ok.infinite());
  CHECK(std::abs(*ok.value) < 1e-12);
}

TEST_CASE("KL divergence is nonnegative on random pairs") {
  std::mt19937_64 rng(21);
  for (int rep = 0; rep < 50; ++rep) {
    const auto rho = random_mixed(3, rng);
    const auto sigma = random_mixed(3, rng);
    CHECK(*kl_divergence(rho, sigma).value >= -1e-12);
  }
}

TEST_CASE("KL divergence rejects mismatched dimensions") {
  CHECK_THROWS_AS(kl_divergence(diag2(0.5), DensityMatrix({3}, CMatrix::Identity(3, 3) / 3.0)), DomainError);
}
