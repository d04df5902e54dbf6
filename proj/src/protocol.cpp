#include "qfb/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qfb/info_metrics.hpp"

namespace qfb {

ProjectiveMeasurement::ProjectiveMeasurement(std::vector<CMatrix> projectors)
    : projectors_(std::move(projectors)) {
  if (projectors_.empty()) throw DomainError("measurement: no projectors");
  const Eigen::Index d = projectors_.front().rows();
  CMatrix sum = CMatrix::Zero(d, d);
  for (std::size_t mu = 0; mu < projectors_.size(); ++mu) {
    const CMatrix& p = projectors_[mu];
    const std::string tag = "measurement: projector " + std::to_string(mu);
    if (p.rows() != d || p.cols() != d) throw DomainError(tag + " has wrong shape");
    if (max_hermitian_deviation(p) > NumericPolicy::projector) {
      throw DomainError(tag + " is not Hermitian");
    }
    if (max_abs_deviation(p * p, p) > NumericPolicy::projector) {
      throw DomainError(tag + " is not idempotent");
    }
    for (std::size_t nu = 0; nu < mu; ++nu) {
      if ((p * projectors_[nu]).cwiseAbs().maxCoeff() > NumericPolicy::projector) {
        throw DomainError(tag + " is not orthogonal to projector " + std::to_string(nu));
      }
    }
    sum += p;
  }
  if (max_abs_deviation(sum, CMatrix::Identity(d, d)) > NumericPolicy::projector) {
    throw DomainError("measurement: projectors do not sum to identity");
  }
}

ProjectiveMeasurement ProjectiveMeasurement::from_basis(const CMatrix& unitary) {
  std::vector<CMatrix> ps;
  ps.reserve(unitary.cols());
  for (Eigen::Index k = 0; k < unitary.cols(); ++k) {
    ps.push_back(unitary.col(k) * unitary.col(k).adjoint());
  }
  return ProjectiveMeasurement(std::move(ps));
}

ProjectiveMeasurement ProjectiveMeasurement::bloch(const Eigen::Vector3d& n) {
  const double len = n.norm();
  if (std::abs(len - 1.0) > 1e-10) throw DomainError("bloch measurement: |n| != 1");
  const CMatrix ns = n.x() * pauli::x() + n.y() * pauli::y() + n.z() * pauli::z();
  const CMatrix id = pauli::identity();
  return ProjectiveMeasurement({0.5 * (id + ns), 0.5 * (id - ns)});
}

ProjectiveMeasurement ProjectiveMeasurement::trivial(int dim) {
  return ProjectiveMeasurement({CMatrix::Identity(dim, dim)});
}

CMatrix ProjectiveMeasurement::refinement_basis() const {
  const int d = dimension();
  CMatrix u(d, d);
  Eigen::Index col = 0;
  for (const auto& p : projectors_) {
    const auto spec = eig_hermitian(p);
    for (Eigen::Index k = 0; k < d; ++k) {
      if (spec.eigenvalues(k) > 0.5 && col < d) u.col(col++) = spec.eigenvectors.col(k);
    }
  }
  if (col != d) throw DomainError("measurement: projector ranks do not add up to dimension");
  // Re-orthonormalize to absorb eigensolver round-off.
  Eigen::HouseholderQR<CMatrix> qr(u);
  CMatrix q = qr.householderQ() * CMatrix::Identity(d, d);
  const CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int k = 0; k < d; ++k) {
    const Complex rk = r(k, k);
    if (std::abs(rk) > 0.0) q.col(k) *= rk / std::abs(rk);
  }
  return q;
}

Hamiltonian::Hamiltonian(CMatrix matrix) : matrix_(std::move(matrix)) {
  if (matrix_.rows() != matrix_.cols() || matrix_.rows() == 0) {
    throw DomainError("hamiltonian: matrix must be square and nonempty");
  }
  if (max_hermitian_deviation(matrix_) > NumericPolicy::hermiticity) {
    throw DomainError("hamiltonian: not Hermitian");
  }
  if (matrix_.cwiseAbs().maxCoeff() == 0.0) throw DomainError("hamiltonian: zero matrix");
}

double Hamiltonian::energy(const CMatrix& rho) const {
  if (rho.rows() != matrix_.rows()) throw DomainError("hamiltonian: dimension mismatch");
  return (rho * matrix_).trace().real();
}

FeedbackPolicy::FeedbackPolicy(std::vector<CMatrix> unitaries) : unitaries_(std::move(unitaries)) {
  for (std::size_t mu = 0; mu < unitaries_.size(); ++mu) {
    const CMatrix& u = unitaries_[mu];
    if (u.rows() != u.cols()) throw DomainError("feedback: unitary " + std::to_string(mu) + " not square");
    const CMatrix id = CMatrix::Identity(u.rows(), u.cols());
    if (max_abs_deviation(u.adjoint() * u, id) > NumericPolicy::unitarity) {
      throw DomainError("feedback: matrix " + std::to_string(mu) + " is not unitary");
    }
  }
}

FeedbackPolicy FeedbackPolicy::identity(std::size_t outcomes, int dim) {
  return constant(outcomes, CMatrix::Identity(dim, dim));
}

FeedbackPolicy FeedbackPolicy::constant(std::size_t outcomes, const CMatrix& u) {
  return FeedbackPolicy(std::vector<CMatrix>(outcomes, u));
}

OutcomeEnsemble measure(const PartitionedPureState& state, const ProjectiveMeasurement& m) {
  const auto ab = state.ancilla_blocks();
  if (m.dimension() != ab.dim_a) {
    throw DomainError("measure: projector dimension " + std::to_string(m.dimension()) +
                      " does not match ancilla dimension " + std::to_string(ab.dim_a));
  }
  const auto s_dims = state.layout().role_dims(Role::S);
  OutcomeEnsemble ens{state.system_state(), {}};
  ens.outcomes.reserve(m.size());
  for (const auto& p : m.projectors()) {
    AncillaBlocks post = ab;
    for (int a = 0; a < ab.dim_a; ++a) {
      post.blocks[a].setZero();
      for (int b = 0; b < ab.dim_a; ++b) post.blocks[a] += p(a, b) * ab.blocks[b];
    }
    CMatrix rho = CMatrix::Zero(ab.dim_s, ab.dim_s);
    for (const auto& blk : post.blocks) rho += blk * blk.adjoint();
    Outcome out;
    out.probability = std::max(0.0, rho.trace().real());
    if (out.probability > NumericPolicy::zero_probability) {
      rho /= out.probability;
      rho = 0.5 * (rho + rho.adjoint());
      out.system_state.emplace(s_dims, std::move(rho));
      out.global_state.emplace(
          PartitionedPureState::normalized(state.layout(), assemble_amplitudes(state.layout(), post)));
    }
    ens.outcomes.push_back(std::move(out));
  }
  return ens;
}

DensityMatrix apply_feedback(const OutcomeEnsemble& ens, const FeedbackPolicy& policy) {
  if (policy.size() != ens.outcomes.size()) {
    throw DomainError("apply_feedback: policy has " + std::to_string(policy.size()) +
                      " unitaries for " + std::to_string(ens.outcomes.size()) + " outcomes");
  }
  const Eigen::Index d = ens.initial_system.dimension();
  CMatrix rho = CMatrix::Zero(d, d);
  for (std::size_t mu = 0; mu < ens.outcomes.size(); ++mu) {
    const auto& o = ens.outcomes[mu];
    if (!o.present()) continue;
    const CMatrix& u = policy.unitary(mu);
    if (u.rows() != d) throw DomainError("apply_feedback: unitary dimension mismatch");
    rho += o.probability * (u * o.system_state->matrix() * u.adjoint());
  }
  rho = 0.5 * (rho + rho.adjoint());
  return DensityMatrix(ens.initial_system.dims(), std::move(rho));
}

double average_post_entropy(const OutcomeEnsemble& ens) {
  double s = 0.0;
  for (const auto& o : ens.outcomes) {
    if (o.present()) s += o.probability * von_neumann_entropy(*o.system_state);
  }
  return s;
}

ProtocolResult run_protocol(const PartitionedPureState& state, const ProjectiveMeasurement& m,
                            const FeedbackPolicy& policy, const Hamiltonian& h) {
  auto ens = measure(state, m);
  if (h.dimension() != ens.initial_system.dimension()) {
    throw DomainError("run_protocol: Hamiltonian dimension does not match S");
  }
  auto final_state = apply_feedback(ens, policy);
  ProtocolResult r{.rho_S_final = final_state, .ensemble = ens};
  r.E_S_initial = h.energy(ens.initial_system);
  r.E_S_final = h.energy(final_state);
  r.E_ext = r.E_S_initial - r.E_S_final;
  r.S_initial = von_neumann_entropy(ens.initial_system);
  r.S_final = von_neumann_entropy(final_state);
  r.avg_post_entropy = average_post_entropy(ens);
  r.I_QC = r.S_initial - r.avg_post_entropy;
  r.I_QC_clamped = std::clamp(r.I_QC, 0.0, r.S_initial);
  r.delta_S = r.S_final - r.S_initial;
  return r;
}

double qc_mutual_information(const PartitionedPureState& state, const ProjectiveMeasurement& m) {
  const auto ens = measure(state, m);
  return von_neumann_entropy(ens.initial_system) - average_post_entropy(ens);
}

namespace detail {

CMatrix rank1_post_state(const AncillaBlocks& blocks, const CVector& v) {
  CMatrix phi = CMatrix::Zero(blocks.dim_s, blocks.dim_e);
  for (int a = 0; a < blocks.dim_a; ++a) phi += std::conj(v(a)) * blocks.blocks[a];
  return phi * phi.adjoint();
}

}  // namespace detail

}  // namespace qfb
