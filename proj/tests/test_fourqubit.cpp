#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "qfb/fourqubit.hpp"
#include "qfb/info_metrics.hpp"

using namespace qfb;

namespace {

const double kSqrt5 = std::sqrt(5.0);
const double kKink = 3.0 * kSqrt5 / 7.0;

Eigen::Vector3d random_direction(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  return Eigen::Vector3d(g(rng), g(rng), g(rng)).normalized();
}

}  // namespace

TEST_CASE("eta state amplitudes and reduced state") {
  const auto s = build_eta_state({0.0});
  int nonzero = 0;
  for (Eigen::Index k = 0; k < s.amplitudes().size(); ++k) {
    const double a = std::abs(s.amplitudes()(k));
    if (a < 1e-15) continue;
    ++nonzero;
    CHECK((std::abs(a - 2.0 / std::sqrt(14.0)) < 1e-15 || std::abs(a - 1.0 / std::sqrt(14.0)) < 1e-15));
  }
  CHECK(nonzero == 8);
  CHECK(max_abs_deviation(s.system_state().matrix(), CMatrix::Identity(2, 2) / 2.0) < 1e-15);
  // Amplitude placement: a on |uuuu> (index 0), h on |dddd> (index 15).
  CHECK(s.amplitudes()(0).real() == doctest::Approx(2.0 / std::sqrt(14.0)));
  CHECK(s.amplitudes()(15).real() == doctest::Approx(-2.0 / std::sqrt(14.0)));
  CHECK(s.amplitudes()(10).real() == doctest::Approx(1.0 / std::sqrt(14.0)));  // e on |dudu>
  const auto s3 = build_eta_state({0.3});
  CHECK(s3.system_state().matrix()(0, 0).real() == doctest::Approx(0.65).epsilon(1e-14));
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(build_eta_state({1.0}), DomainError);
  CHECK_THROWS_AS(build_eta_state({-1.0}), DomainError);
  CHECK_THROWS_AS(build_eta_state({std::nan("")}), DomainError);
  FamilyCoefficients c;
  c.a = 1.0;
  c.b = 1.0;
  CHECK_THROWS_AS(build_family_state(c), DomainError);
}

TEST_CASE("family conditions") {
  CHECK(check_family_conditions(FamilyCoefficients::from_eta(0.0)));
  CHECK_FALSE(check_family_conditions(FamilyCoefficients::from_eta(0.3)));
  // Direct substitution at eta = 1/sqrt8: the half-norm condition fails by
  // 3 eta / 7 on each side.
  const auto c = FamilyCoefficients::from_eta(1.0 / std::sqrt(8.0));
  const double up = c.a * c.a + c.b * c.b + c.c * c.c + c.d * c.d;
  CHECK(up == doctest::Approx(0.5 + 0.5 / std::sqrt(8.0)).epsilon(1e-14));
  CHECK_FALSE(check_family_conditions(c));
  int hits = 0;
  for (int k = -100; k <= 100; ++k) {
    const double eta = k / 101.0;
    const bool ok = check_family_conditions(FamilyCoefficients::from_eta(eta));
    CHECK(ok == (k == 0));
    hits += ok;
  }
  CHECK(hits == 1);
  std::mt19937_64 rng(9);
  for (int rep = 0; rep < 50; ++rep) {
    const auto s = sample_symmetric_family(rng);
    CHECK(s.norm_squared() == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(check_family_conditions(s));
  }
}

TEST_CASE("symmetric family gives outcome-independent spectra for any measurement") {
  std::mt19937_64 rng(19);
  for (int rep = 0; rep < 10; ++rep) {
    const auto state = build_family_state(sample_symmetric_family(rng));
    for (int k = 0; k < 5; ++k) {
      const auto ens = measure(state, ProjectiveMeasurement::bloch(random_direction(rng)));
      const auto a = eig_hermitian(ens.outcomes[0].system_state->matrix()).eigenvalues;
      const auto b = eig_hermitian(ens.outcomes[1].system_state->matrix()).eigenvalues;
      CHECK(std::abs(a(0) - b(0)) < 1e-10);
      CHECK(std::abs(ens.outcomes[0].probability - 0.5) < 1e-12);
    }
  }
}

TEST_CASE("closed forms at eta = 0") {
  const Eigen::Vector3d n(2.0 / kSqrt5, 0.0, 1.0 / kSqrt5);
  const auto q = analytic_quantities({0.0}, n, analytic_beta_eff_at_zero());
  const double ef = std::log(7.0) - (3.0 * kSqrt5 / 14.0) * std::log((7.0 + 3.0 * kSqrt5) / (7.0 - 3.0 * kSqrt5));
  CHECK(q.E_F == doctest::Approx(ef).epsilon(1e-14));
  CHECK(q.E_F == doctest::Approx(0.1013004021).epsilon(1e-9));
  CHECK(q.I_QC == doctest::Approx(std::log(2.0) - ef).epsilon(1e-14));
  CHECK(q.E_SA_asym == doctest::Approx(q.I_QC).epsilon(1e-14));
  CHECK(q.E_SA_asym == doctest::Approx(0.5918467785).epsilon(1e-9));
  CHECK(*q.D_given_beta == doctest::Approx(std::log(3.5)).epsilon(1e-14));
  CHECK(q.p_mu[0] == 0.5);
  CHECK(q.post_spectra[0][0] == doctest::Approx((7.0 + 3.0 * kSqrt5) / 14.0));
  CHECK(analytic_gibbs_entropy(analytic_beta_eff_at_zero()) == doctest::Approx(ef).epsilon(1e-13));
  CHECK(analytic_beta_eff_at_zero() == doctest::Approx(1.9248473002).epsilon(1e-9));
}

TEST_CASE("closed-form KL divergence matches the numeric divergence") {
  for (double eta : {-0.8, -0.1, 0.0, 0.45, 0.9}) {
    for (double beta : {0.2, 1.0, 3.0}) {
      const auto rho = build_eta_state({eta}).system_state();
      const auto g = gibbs(example_hamiltonian(), beta);
      CHECK(analytic_kl_divergence({eta}, beta) == doctest::Approx(*kl_divergence(rho, g.sigma).value).epsilon(1e-10));
    }
  }
}

TEST_CASE("piecewise maximum extraction") {
  CHECK(analytic_max_extraction({0.0}) == doctest::Approx(kKink));
  CHECK(analytic_max_extraction({-0.99}) == 0.0);
  CHECK(analytic_max_extraction({0.99}) == doctest::Approx(1.98));
  // Continuous at both kinks.
  CHECK(analytic_max_extraction({kKink - 1e-12}) == doctest::Approx(analytic_max_extraction({kKink + 1e-12})));
  CHECK(analytic_max_extraction({-kKink + 1e-12}) == doctest::Approx(0.0).epsilon(1e-10));
}

TEST_CASE("analytic and numeric pipelines agree on random (eta, n)") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(-0.98, 0.98);
  for (int rep = 0; rep < 50; ++rep) {
    const double eta = u(rng);
    const Eigen::Vector3d n = random_direction(rng);
    const auto q = analytic_quantities({eta}, n);
    const auto state = build_eta_state({eta});
    const auto m = ProjectiveMeasurement::bloch(n);
    const auto ens = measure(state, m);
    for (int mu = 0; mu < 2; ++mu) {
      CHECK(std::abs(ens.outcomes[mu].probability - q.p_mu[mu]) < 1e-10);
      const auto spec = eig_hermitian(ens.outcomes[mu].system_state->matrix()).eigenvalues;
      const double lo = std::min(q.post_spectra[mu][0], q.post_spectra[mu][1]);
      const double hi = std::max(q.post_spectra[mu][0], q.post_spectra[mu][1]);
      CHECK(std::abs(spec(0) - lo) < 1e-10);
      CHECK(std::abs(spec(1) - hi) < 1e-10);
    }
    CHECK(std::abs(von_neumann_entropy(state.system_state()) - q.S_initial) < 1e-10);
    CHECK(std::abs(average_post_entropy(ens) - q.avg_post_entropy) < 1e-10);
    CHECK(std::abs(qc_mutual_information(state, m) - q.I_QC) < 1e-10);
  }
}

TEST_CASE("numeric EoF follows the closed form across eta") {
  for (double eta : {-0.9, -0.4, 0.0, 0.3, 0.75}) {
    const double numeric = eof_projective(build_eta_state({eta}), SearchConfig{}).value;
    CHECK(std::abs(numeric - analytic_entanglement_of_formation({eta})) < 1e-8);
  }
}

TEST_CASE("sweep rows") {
  const auto row = sweep_row(0.0, SearchConfig{});
  CHECK(row.defined());
  CHECK(std::abs(row.gap) < 1e-5);
  CHECK(row.bound_second == doctest::Approx(row.D_term + row.E_SA_term).epsilon(1e-12));
  CHECK(std::abs(row.max_E_ext - kKink) < 1e-5);
  const auto grid = default_eta_grid();
  REQUIRE(grid.size() == 199);
  CHECK(grid.front() == -0.99);
  CHECK(grid[99] == 0.0);
  CHECK(grid.back() == 0.99);
  const double pts[] = {0.9, 0.95, 0.99};
  const auto rows = sweep_eta(pts, SearchConfig{}, 2);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(rows[i].eta == pts[i]);
    CHECK(std::abs(rows[i].max_E_ext - analytic_max_extraction({pts[i]})) < 1e-4);
  }
  CHECK_THROWS_AS(sweep_row(1.0, SearchConfig{}), DomainError);
}
