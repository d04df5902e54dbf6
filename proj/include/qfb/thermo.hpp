#pragma once

#include <optional>
#include <vector>

#include "qfb/search.hpp"

namespace qfb {

struct GibbsState {
  DensityMatrix sigma;
  double beta = 0.0;
  double partition_function = 0.0;
  double log_partition_function = 0.0;
  double helmholtz = 0.0;  // -ln Z / beta
  double energy = 0.0;
  double entropy = 0.0;
  // Eigenbasis of H (columns, ascending energy) and ln of the matching
  // Gibbs weights, kept exact so tiny weights do not lose precision.
  CMatrix eigenbasis;
  RVector log_probabilities;
};

GibbsState gibbs(const Hamiltonian& h, double beta);

// D(rho || sigma) for a Gibbs sigma, using ln sigma from the stored
// log-weights rather than from a re-diagonalization of sigma.
double gibbs_divergence(const DensityMatrix& rho, const GibbsState& g);

// S(e^{-beta H}/Z) from the spectrum of H, evaluated with a ground-energy
// shift so large beta does not overflow.
double gibbs_entropy(const RVector& h_eigs_ascending, double beta);

// E - S/beta. Both the direct form and F(sigma) + D(rho||sigma)/beta are
// evaluated; a disagreement beyond NumericPolicy::free_energy_identity
// throws std::logic_error.
double noneq_free_energy(const DensityMatrix& rho, const Hamiltonian& h, double beta);

enum class BetaStatus {
  Finite,
  ZeroTemperature,      // beta_eff -> infinity: no S-E entanglement left
  InfiniteTemperature,  // beta_eff -> 0: target at the maximal entropy
};

const char* beta_status_name(BetaStatus s);

struct BetaSolution {
  BetaStatus status = BetaStatus::Finite;
  double beta = 0.0;  // meaningful only when status == Finite
  int bisections = 0;

  bool finite() const { return status == BetaStatus::Finite; }
};

// Unique beta > 0 with S(sigma(beta)) = target_entropy, by bracket doubling
// from [1e-8, 1] followed by bisection.
BetaSolution solve_beta_eff(const Hamiltonian& h, double target_entropy);

struct EqualityCheck {
  bool met = false;
  CMatrix basis;  // the I_QC-maximizing (E_F-minimizing) rank-1 measurement
  std::vector<double> probabilities;
  std::vector<RVector> spectra;  // ascending, one per outcome (empty when p <= 1e-10)
};

EqualityCheck check_equality_condition(const PartitionedPureState& state, const SearchConfig& cfg);

// Same test on an already optimized basis.
EqualityCheck equality_condition_for_basis(const PartitionedPureState& state, const CMatrix& basis);

struct BoundReport {
  double E_ext = 0.0;
  double E_S_initial = 0.0;
  double E_S_final = 0.0;
  double S_initial = 0.0;
  double S_final = 0.0;
  double delta_S = 0.0;
  double I_QC = 0.0;
  double E_F = 0.0;
  double E_SA_asym = 0.0;
  BetaStatus beta_status = BetaStatus::Finite;
  // Unset when beta_eff sits at one of its limits.
  std::optional<double> beta_eff;
  std::optional<double> D_initial;
  std::optional<double> bound_first;
  std::optional<double> bound_second;
  std::optional<double> gap_first;
  std::optional<double> gap_second;
  bool equality_condition_met = false;
  CMatrix eof_basis;
  std::vector<RVector> eof_spectra;

  bool defined() const { return beta_status == BetaStatus::Finite; }
};

// Runs the protocol, computes E_F with `m` seeded into the search, solves for
// beta_eff and fills both bounds. The bound is also computed in free-energy
// form and cross-checked (std::logic_error on mismatch).
BoundReport evaluate_bounds(const PartitionedPureState& state, const Hamiltonian& h,
                            const ProjectiveMeasurement& m, const FeedbackPolicy& policy,
                            const SearchConfig& cfg);

}  // namespace qfb
