#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "qfb/protocol.hpp"

namespace qfb {

struct SearchConfig {
  // Fibonacci-sphere points for a qubit ancilla, low-discrepancy points in
  // the generator cube otherwise.
  int grid_points = 256;
  int multistarts = 16;
  double tolerance = 1e-10;
  int max_iterations = 2000;
  std::uint64_t seed = 0;

  void validate() const;
};

// Maps a real parameter vector to a unitary basis of the ancilla.
//
// d = 2: (theta, phi) -> Bloch basis {|n+>, |n->} with
//   n = (sin theta cos phi, sin theta sin phi, cos theta).
// d > 2: x in R^{d^2} -> reference * exp(i sum_k x_k T_k), with T_k the
//   generalized Gell-Mann matrices plus the identity.
class BasisParameterization {
 public:
  explicit BasisParameterization(int dim);

  int dimension() const { return dim_; }
  std::size_t parameter_count() const { return dim_ == 2 ? 2 : std::size_t(dim_) * dim_; }

  CMatrix unitary(std::span<const double> x, const CMatrix& reference) const;
  CMatrix unitary(std::span<const double> x) const;
  ProjectiveMeasurement measurement(std::span<const double> x, const CMatrix& reference) const;

  static Eigen::Vector3d bloch_vector(double theta, double phi);
  static CMatrix bloch_basis(double theta, double phi);
  // (theta, phi) of the Bloch vector of |v><v| for a qubit ket v.
  static std::vector<double> bloch_angles(const CVector& v);

 private:
  int dim_;
  std::vector<CMatrix> generators_;
};

struct OptimizationOutcome {
  double value = 0.0;
  std::vector<double> parameters;
  CMatrix reference;  // parameters are relative to this basis (identity for d = 2)
  CMatrix basis;      // best rank-1 basis, one outcome per column
  std::size_t evaluations = 0;
  bool converged = false;

  ProjectiveMeasurement measurement() const { return ProjectiveMeasurement::from_basis(basis); }
  // Bloch vector of outcome 0, for qubit ancillas.
  std::optional<Eigen::Vector3d> bloch_vector() const;
};

struct FeedbackChoice {
  CMatrix unitary;
  double energy = 0.0;
};

// Passive-state alignment: eigenvectors of rho by descending eigenvalue are
// mapped onto eigenvectors of h by ascending energy.
FeedbackChoice optimal_feedback(const DensityMatrix& rho, const Hamiltonian& h);

// Per-outcome optimal feedback (identity on absent outcomes).
FeedbackPolicy optimal_policy(const OutcomeEnsemble& ens, const Hamiltonian& h);

double daemonic_ergotropy(const PartitionedPureState& state, const ProjectiveMeasurement& m,
                          const Hamiltonian& h);

OptimizationOutcome maximize_extraction(const PartitionedPureState& state, const Hamiltonian& h,
                                        const SearchConfig& cfg);

// Projective entanglement of formation: minimum over rank-1 ancilla bases of
// the average post-measurement system entropy. Every measurement in
// `seeded` is refined to a rank-1 basis and used as an extra start.
OptimizationOutcome eof_projective(const PartitionedPureState& state, const SearchConfig& cfg,
                                   std::span<const ProjectiveMeasurement> seeded = {});

double asymmetric_entanglement(const PartitionedPureState& state, const SearchConfig& cfg,
                               std::span<const ProjectiveMeasurement> seeded = {});

namespace detail {

// Minimal energy sum_k lambda_k(desc) eps_k(asc); rho may be unnormalized.
double passive_energy(const RVector& rho_eigs_ascending, const RVector& h_eigs_ascending);

// Sum_mu p_mu S(rho_S^m(mu)) for the rank-1 basis given by the columns of u.
double average_entropy_for_basis(const AncillaBlocks& blocks, const CMatrix& u);

struct NelderMeadResult {
  std::vector<double> x;
  double value = 0.0;
  std::size_t evaluations = 0;
  bool converged = false;
};

NelderMeadResult nelder_mead(const std::function<double(std::span<const double>)>& f,
                             std::vector<double> start, double step, double tolerance,
                             int max_iterations);

}  // namespace detail

}  // namespace qfb
