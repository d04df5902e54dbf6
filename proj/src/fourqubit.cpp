#include "qfb/fourqubit.hpp"

#include <cmath>
#include <limits>

#include "qfb/info_metrics.hpp"
#include "qfb/parallel.hpp"

namespace qfb {

namespace {

const double kSqrt5 = std::sqrt(5.0);

// x ln x with 0 ln 0 = 0.
double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

double binary_entropy_eta(double eta) {
  return -xlogx((1.0 + eta) / 2.0) - xlogx((1.0 - eta) / 2.0);
}

// Average post-measurement entropy as a function of s = 2 n_x + n_z.
double average_entropy_closed_form(double eta, double s) {
  return binary_entropy_eta(eta) - (xlogx(7.0 + 3.0 * s) + xlogx(7.0 - 3.0 * s)) / 14.0 +
         (xlogx(7.0 + 3.0 * eta * s) + xlogx(7.0 - 3.0 * eta * s)) / 14.0;
}

}  // namespace

void ExampleParameters::validate() const {
  if (!(std::abs(eta) < 1.0)) throw DomainError("eta must satisfy |eta| < 1");
}

FamilyCoefficients FamilyCoefficients::from_eta(double eta) {
  ExampleParameters{eta}.validate();
  const double up = std::sqrt((1.0 + eta) / 14.0);
  const double down = std::sqrt((1.0 - eta) / 14.0);
  return {2.0 * up, up, up, up, down, down, -down, -2.0 * down};
}

double FamilyCoefficients::norm_squared() const {
  double s = 0.0;
  for (double v : values()) s += v * v;
  return s;
}

HilbertLayout four_qubit_layout() {
  return HilbertLayout({2, 2, 2, 2}, {Role::S, Role::A, Role::E, Role::E});
}

Hamiltonian example_hamiltonian() { return Hamiltonian(pauli::z()); }

PartitionedPureState build_family_state(const FamilyCoefficients& c) {
  if (std::abs(c.norm_squared() - 1.0) > NumericPolicy::family_norm) {
    throw DomainError("family coefficients are not normalized");
  }
  CVector amp = CVector::Zero(16);
  const auto v = c.values();
  for (std::size_t k = 0; k < v.size(); ++k) amp(kFamilyIndices[k]) = v[k];
  return PartitionedPureState(four_qubit_layout(), std::move(amp));
}

PartitionedPureState build_eta_state(const ExampleParameters& p) {
  p.validate();
  return build_family_state(FamilyCoefficients::from_eta(p.eta));
}

bool check_family_conditions(const FamilyCoefficients& c) {
  const double tol = NumericPolicy::family_condition;
  const double up = c.a * c.a + c.b * c.b + c.c * c.c + c.d * c.d;
  const double down = c.e * c.e + c.f * c.f + c.g * c.g + c.h * c.h;
  const bool half = std::abs(up - 0.5) <= tol && std::abs(down - 0.5) <= tol;
  const bool overlap = std::abs((c.a * c.c + c.b * c.d) + (c.e * c.g + c.f * c.h)) <= tol;
  const bool imbalance = std::abs((c.a * c.a + c.b * c.b - c.c * c.c - c.d * c.d) +
                                  (c.e * c.e + c.f * c.f - c.g * c.g - c.h * c.h)) <= tol;
  return half && overlap && imbalance;
}

FamilyCoefficients sample_symmetric_family(std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::acos(-1.0));
  double x[4];
  double n2 = 0.0;
  for (double& v : x) {
    v = gauss(rng);
    n2 += v * v;
  }
  const double scale = std::sqrt(0.5 / n2);
  for (double& v : x) v *= scale;
  // (e, f) = R (c, d) and (g, h) = -R (a, b) for a rotation R.
  const double t = angle(rng), ct = std::cos(t), st = std::sin(t);
  FamilyCoefficients out;
  out.a = x[0];
  out.b = x[1];
  out.c = x[2];
  out.d = x[3];
  out.e = ct * x[2] - st * x[3];
  out.f = st * x[2] + ct * x[3];
  out.g = -(ct * x[0] - st * x[1]);
  out.h = -(st * x[0] + ct * x[1]);
  return out;
}

double analytic_max_extraction(const ExampleParameters& p) {
  p.validate();
  const double kink = 3.0 * kSqrt5 / 7.0;
  if (p.eta <= -kink) return 0.0;
  if (p.eta <= kink) return p.eta + kink;
  return 2.0 * p.eta;
}

AnalyticQuantities analytic_quantities(const ExampleParameters& p, const Eigen::Vector3d& n,
                                       std::optional<double> beta) {
  p.validate();
  if (std::abs(n.norm() - 1.0) > 1e-10) throw DomainError("analytic_quantities: |n| != 1");
  const double eta = p.eta;
  const double s = 2.0 * n.x() + n.z();
  AnalyticQuantities q;
  for (int mu = 0; mu < 2; ++mu) {
    const double sign = mu == 0 ? 1.0 : -1.0;
    q.p_mu[mu] = (7.0 + sign * 3.0 * eta * s) / 14.0;
    q.post_spectra[mu][0] = (1.0 + eta) / 14.0 * (7.0 + sign * 3.0 * s) / (2.0 * q.p_mu[mu]);
    q.post_spectra[mu][1] = (1.0 - eta) / 14.0 * (7.0 - sign * 3.0 * s) / (2.0 * q.p_mu[mu]);
  }
  q.S_initial = binary_entropy_eta(eta);
  q.avg_post_entropy = average_entropy_closed_form(eta, s);
  q.I_QC = (xlogx(7.0 + 3.0 * s) + xlogx(7.0 - 3.0 * s)) / 14.0 -
           (xlogx(7.0 + 3.0 * eta * s) + xlogx(7.0 - 3.0 * eta * s)) / 14.0;
  q.E_F = analytic_entanglement_of_formation(p);
  q.E_SA_asym = (xlogx(7.0 + 3.0 * kSqrt5) + xlogx(7.0 - 3.0 * kSqrt5)) / 14.0 -
                (xlogx(7.0 + 3.0 * kSqrt5 * eta) + xlogx(7.0 - 3.0 * kSqrt5 * eta)) / 14.0;
  if (beta) q.D_given_beta = analytic_kl_divergence(p, *beta);
  return q;
}

double analytic_entanglement_of_formation(const ExampleParameters& p) {
  p.validate();
  return average_entropy_closed_form(p.eta, kSqrt5);
}

double analytic_gibbs_entropy(double beta) {
  const double up = 1.0 + std::exp(2.0 * beta);
  const double down = 1.0 + std::exp(-2.0 * beta);
  return std::log(up) / up + std::log(down) / down;
}

double analytic_kl_divergence(const ExampleParameters& p, double beta) {
  p.validate();
  const double eta = p.eta;
  return -std::log(2.0) + (1.0 + eta) / 2.0 * std::log((1.0 + eta) * (1.0 + std::exp(2.0 * beta))) +
         (1.0 - eta) / 2.0 * std::log((1.0 - eta) * (1.0 + std::exp(-2.0 * beta)));
}

double analytic_beta_eff_at_zero() {
  return 0.5 * std::log((7.0 + 3.0 * kSqrt5) / (7.0 - 3.0 * kSqrt5));
}

SweepRow sweep_row(double eta, const SearchConfig& cfg) {
  const auto state = build_eta_state({eta});
  const auto h = example_hamiltonian();
  const auto best = maximize_extraction(state, h, cfg);
  const ProjectiveMeasurement seeded[] = {best.measurement()};
  const auto eof = eof_projective(state, cfg, seeded);
  const auto rho_i = state.system_state();

  SweepRow row;
  row.eta = eta;
  row.E_F = eof.value;
  row.max_E_ext = best.value;
  const auto beta = solve_beta_eff(h, eof.value);
  if (!beta.finite()) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    row.beta_eff = row.D_term = row.E_SA_term = row.bound_second = row.gap = nan;
    row.status = "undefined";
    return row;
  }
  const auto g = gibbs(h, beta.beta);
  row.beta_eff = beta.beta;
  row.D_term = gibbs_divergence(rho_i, g) / beta.beta;
  row.E_SA_term = (von_neumann_entropy(rho_i) - eof.value) / beta.beta;
  row.bound_second = row.D_term + row.E_SA_term;
  row.gap = row.bound_second - row.max_E_ext;
  return row;
}

std::vector<SweepRow> sweep_eta(std::span<const double> grid, const SearchConfig& cfg,
                                    int workers) {
  for (double eta : grid) ExampleParameters{eta}.validate();
  std::vector<SweepRow> rows(grid.size());
  parallel_for(grid.size(), workers, [&](std::size_t i) { rows[i] = sweep_row(grid[i], cfg); });
  return rows;
}

std::vector<double> default_eta_grid() {
  std::vector<double> g;
  for (int k = -99; k <= 99; ++k) g.push_back(k / 100.0);
  return g;
}

}  // namespace qfb
