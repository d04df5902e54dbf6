#pragma once

#include <optional>
#include <vector>

#include "qfb/tensor.hpp"

namespace qfb {

// Complete family of mutually orthogonal projectors on the ancilla, indexed
// by outcome. Validated on construction.
class ProjectiveMeasurement {
 public:
  explicit ProjectiveMeasurement(std::vector<CMatrix> projectors);

  // Rank-1 projectors onto the columns of a unitary.
  static ProjectiveMeasurement from_basis(const CMatrix& unitary);
  // Qubit measurement P(mu) = (1 + (-1)^mu n.sigma) / 2.
  static ProjectiveMeasurement bloch(const Eigen::Vector3d& n);
  // Single outcome, identity projector.
  static ProjectiveMeasurement trivial(int dim);

  std::size_t size() const { return projectors_.size(); }
  int dimension() const { return static_cast<int>(projectors_.front().rows()); }
  const CMatrix& projector(std::size_t mu) const { return projectors_.at(mu); }
  const std::vector<CMatrix>& projectors() const { return projectors_; }

  // A unitary whose columns are eigenvectors of the projectors, grouped by
  // outcome; its rank-1 measurement refines this one.
  CMatrix refinement_basis() const;

 private:
  std::vector<CMatrix> projectors_;
};

class Hamiltonian {
 public:
  explicit Hamiltonian(CMatrix matrix);

  const CMatrix& matrix() const { return matrix_; }
  int dimension() const { return static_cast<int>(matrix_.rows()); }
  double energy(const CMatrix& rho) const;
  double energy(const DensityMatrix& rho) const { return energy(rho.matrix()); }

 private:
  CMatrix matrix_;
};

class FeedbackPolicy {
 public:
  explicit FeedbackPolicy(std::vector<CMatrix> unitaries);

  static FeedbackPolicy identity(std::size_t outcomes, int dim);
  static FeedbackPolicy constant(std::size_t outcomes, const CMatrix& u);

  std::size_t size() const { return unitaries_.size(); }
  const CMatrix& unitary(std::size_t mu) const { return unitaries_.at(mu); }

 private:
  std::vector<CMatrix> unitaries_;
};

struct Outcome {
  double probability = 0.0;
  // Absent when probability <= NumericPolicy::zero_probability.
  std::optional<DensityMatrix> system_state;
  std::optional<PartitionedPureState> global_state;

  bool present() const { return system_state.has_value(); }
};

struct OutcomeEnsemble {
  DensityMatrix initial_system;
  std::vector<Outcome> outcomes;
};

struct ProtocolResult {
  double E_S_initial = 0.0;
  double E_S_final = 0.0;
  double E_ext = 0.0;
  double S_initial = 0.0;
  double S_final = 0.0;
  double avg_post_entropy = 0.0;
  double I_QC = 0.0;          // raw
  double I_QC_clamped = 0.0;  // clamped to [0, S_initial]
  double delta_S = 0.0;       // S_final - S_initial
  DensityMatrix rho_S_final;
  OutcomeEnsemble ensemble;
};

OutcomeEnsemble measure(const PartitionedPureState& state, const ProjectiveMeasurement& m);

DensityMatrix apply_feedback(const OutcomeEnsemble& ens, const FeedbackPolicy& policy);

ProtocolResult run_protocol(const PartitionedPureState& state, const ProjectiveMeasurement& m,
                            const FeedbackPolicy& policy, const Hamiltonian& h);

double qc_mutual_information(const PartitionedPureState& state, const ProjectiveMeasurement& m);

// Sum_mu p_mu S(rho_S^m(mu)) straight from an ensemble.
double average_post_entropy(const OutcomeEnsemble& ens);

namespace detail {

// Unnormalized reduced system state for the rank-1 ancilla projector |v><v|:
// its trace is the outcome probability.
CMatrix rank1_post_state(const AncillaBlocks& blocks, const CVector& v);

}  // namespace detail

}  // namespace qfb
