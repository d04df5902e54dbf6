#pragma once

#include <array>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "qfb/thermo.hpp"

namespace qfb {

// Four-qubit example: qubit 1 is S, qubit 2 is A, qubits 3 and 4 are E, and
// H_S = sigma^z on qubit 1.
//
// The closed forms in this header are written directly from scalar
// expressions and never call into the numeric pipeline, so the two can be
// checked against each other.

struct ExampleParameters {
  double eta = 0.0;  // |eta| < 1

  void validate() const;
};

// Coefficients of
//   a|uuuu> + b|uuud> + c|uduu> + d|udud> + e|dudu> + f|dudd> + g|dddu> + h|dddd>.
struct FamilyCoefficients {
  double a = 0, b = 0, c = 0, d = 0, e = 0, f = 0, g = 0, h = 0;

  static FamilyCoefficients from_eta(double eta);
  std::array<double, 8> values() const { return {a, b, c, d, e, f, g, h}; }
  double norm_squared() const;
};

// Basis indices (subsystem 0 most significant) of the eight family terms.
inline constexpr std::array<int, 8> kFamilyIndices{0, 1, 4, 5, 10, 11, 14, 15};

HilbertLayout four_qubit_layout();
Hamiltonian example_hamiltonian();

PartitionedPureState build_eta_state(const ExampleParameters& p);
PartitionedPureState build_family_state(const FamilyCoefficients& c);

// Conditions under which the post-measurement spectra are independent of the
// outcome for every measurement:
//   a^2+b^2+c^2+d^2 = e^2+f^2+g^2+h^2 = 1/2,
//   ac+bd = -(eg+fh),
//   a^2+b^2-c^2-d^2 = -(e^2+f^2-g^2-h^2).
bool check_family_conditions(const FamilyCoefficients& c);

// Random normalized coefficients satisfying check_family_conditions.
FamilyCoefficients sample_symmetric_family(std::mt19937_64& rng);

// Piecewise maximum extracted energy.
double analytic_max_extraction(const ExampleParameters& p);

struct AnalyticQuantities {
  std::array<double, 2> p_mu{};
  // (lambda_up, lambda_down) of rho_S^m(mu).
  std::array<std::array<double, 2>, 2> post_spectra{};
  double S_initial = 0.0;
  double avg_post_entropy = 0.0;
  double I_QC = 0.0;
  double E_F = 0.0;
  double E_SA_asym = 0.0;
  std::optional<double> D_given_beta;
};

AnalyticQuantities analytic_quantities(const ExampleParameters& p, const Eigen::Vector3d& n,
                                       std::optional<double> beta = std::nullopt);

double analytic_entanglement_of_formation(const ExampleParameters& p);
double analytic_gibbs_entropy(double beta);
double analytic_kl_divergence(const ExampleParameters& p, double beta);
// beta_eff at eta = 0: (1/2) ln((7 + 3 sqrt5) / (7 - 3 sqrt5)).
double analytic_beta_eff_at_zero();

struct SweepRow {
  double eta = 0.0;
  double E_F = 0.0;
  double beta_eff = 0.0;
  double D_term = 0.0;     // D(rho_S^i || sigma_S) / beta_eff
  double E_SA_term = 0.0;  // E_SA / beta_eff
  double bound_second = 0.0;
  double max_E_ext = 0.0;
  double gap = 0.0;
  std::string status = "defined";  // "undefined" at beta_eff limits (NaN terms)

  bool defined() const { return status == "defined"; }
};

SweepRow sweep_row(double eta, const SearchConfig& cfg);

// Rows come back ordered as `grid`, whatever the worker count.
std::vector<SweepRow> sweep_eta(std::span<const double> grid, const SearchConfig& cfg,
                                    int workers = 1);

// eta = -0.99, -0.98, ..., 0.99.
std::vector<double> default_eta_grid();

}  // namespace qfb
