#include "qfb/thermo.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "qfb/info_metrics.hpp"

namespace qfb {

namespace {

struct ShiftedWeights {
  RVector probabilities;
  RVector log_probabilities;
  double log_z = 0.0;
};

ShiftedWeights shifted_weights(const RVector& eps, double beta) {
  const double e0 = eps.minCoeff();
  RVector w(eps.size());
  for (Eigen::Index k = 0; k < eps.size(); ++k) w(k) = std::exp(-beta * (eps(k) - e0));
  const double sum = w.sum();
  const double log_sum = std::log(sum);
  RVector logs(eps.size());
  for (Eigen::Index k = 0; k < eps.size(); ++k) logs(k) = -beta * (eps(k) - e0) - log_sum;
  return {w / sum, logs, -beta * e0 + log_sum};
}

}  // namespace

double gibbs_entropy(const RVector& h_eigs_ascending, double beta) {
  const RVector& eps = h_eigs_ascending;
  const double e0 = eps.minCoeff();
  RVector w(eps.size());
  for (Eigen::Index k = 0; k < eps.size(); ++k) w(k) = std::exp(-beta * (eps(k) - e0));
  const double sum = w.sum();
  const double log_sum = std::log(sum);
  double s = 0.0;
  for (Eigen::Index k = 0; k < eps.size(); ++k) {
    const double p = w(k) / sum;
    if (p > 0.0) s += p * (beta * (eps(k) - e0) + log_sum);
  }
  return s;
}

GibbsState gibbs(const Hamiltonian& h, double beta) {
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw DomainError("gibbs: beta must be a positive finite number");
  }
  const auto spec = eig_hermitian(h.matrix());
  const auto sw = shifted_weights(spec.eigenvalues, beta);
  const CMatrix& v = spec.eigenvectors;
  CMatrix sigma = v * sw.probabilities.cast<Complex>().asDiagonal() * v.adjoint();
  sigma = 0.5 * (sigma + sigma.adjoint());

  std::vector<int> dims{h.dimension()};
  GibbsState g{DensityMatrix(dims, std::move(sigma))};
  g.beta = beta;
  g.log_partition_function = sw.log_z;
  g.partition_function = std::exp(sw.log_z);
  g.helmholtz = -sw.log_z / beta;
  g.energy = sw.probabilities.dot(spec.eigenvalues);
  g.entropy = gibbs_entropy(spec.eigenvalues, beta);
  g.eigenbasis = v;
  g.log_probabilities = sw.log_probabilities;
  return g;
}

double gibbs_divergence(const DensityMatrix& rho, const GibbsState& g) {
  if (rho.dimension() != g.sigma.dimension()) throw DomainError("gibbs_divergence: dimension mismatch");
  const auto r = eig_hermitian(rho.matrix());
  double value = -spectral_entropy(r.eigenvalues);
  for (Eigen::Index j = 0; j < g.eigenbasis.cols(); ++j) {
    const CVector vj = g.eigenbasis.col(j);
    const double weight = vj.dot(rho.matrix() * vj).real();
    value -= weight * g.log_probabilities(j);
  }
  return value;
}

double noneq_free_energy(const DensityMatrix& rho, const Hamiltonian& h, double beta) {
  if (rho.dimension() != h.dimension()) throw DomainError("noneq_free_energy: dimension mismatch");
  const auto g = gibbs(h, beta);
  const double direct = h.energy(rho) - von_neumann_entropy(rho) / beta;
  const double via_divergence = g.helmholtz + gibbs_divergence(rho, g) / beta;
  if (std::abs(direct - via_divergence) >
      NumericPolicy::free_energy_identity * std::max(1.0, std::abs(direct))) {
    std::ostringstream os;
    os.precision(17);
    os << "noneq_free_energy: forms disagree (" << direct << " vs " << via_divergence << ")";
    throw std::logic_error(os.str());
  }
  return direct;
}

const char* beta_status_name(BetaStatus s) {
  switch (s) {
    case BetaStatus::Finite: return "finite";
    case BetaStatus::ZeroTemperature: return "beta_eff -> inf";
    case BetaStatus::InfiniteTemperature: return "beta_eff -> 0";
  }
  return "?";
}

BetaSolution solve_beta_eff(const Hamiltonian& h, double target_entropy) {
  const RVector eps = eig_hermitian(h.matrix()).eigenvalues;
  const double max_entropy = std::log(static_cast<double>(h.dimension()));
  if (target_entropy <= NumericPolicy::beta_target_margin) {
    return {BetaStatus::ZeroTemperature, 0.0, 0};
  }
  if (target_entropy >= max_entropy - NumericPolicy::beta_target_margin) {
    return {BetaStatus::InfiniteTemperature, 0.0, 0};
  }
  auto residual = [&](double b) { return gibbs_entropy(eps, b) - target_entropy; };

  double lo = 1e-8, hi = 1.0;
  if (residual(lo) <= 0.0) return {BetaStatus::InfiniteTemperature, 0.0, 0};
  int doublings = 0;
  while (residual(hi) >= 0.0) {
    lo = hi;
    hi *= 2.0;
    // A degenerate ground level keeps S(sigma) above the target forever.
    if (++doublings > NumericPolicy::beta_max_doublings) return {BetaStatus::ZeroTemperature, 0.0, 0};
  }

  BetaSolution out{BetaStatus::Finite, 0.5 * (lo + hi), 0};
  for (int i = 0; i < NumericPolicy::beta_max_bisections; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double r = residual(mid);
    out.beta = mid;
    out.bisections = i + 1;
    if (std::abs(r) < NumericPolicy::beta_entropy || mid == lo || mid == hi) break;
    if (r > 0.0) lo = mid;
    else hi = mid;
  }
  return out;
}

EqualityCheck equality_condition_for_basis(const PartitionedPureState& state, const CMatrix& basis) {
  const auto blocks = state.ancilla_blocks();
  EqualityCheck out;
  out.basis = basis;
  for (Eigen::Index k = 0; k < basis.cols(); ++k) {
    const CMatrix rho = detail::rank1_post_state(blocks, basis.col(k));
    const double p = rho.trace().real();
    out.probabilities.push_back(p);
    if (p > NumericPolicy::spectrum_probability) out.spectra.push_back(eig_hermitian(rho / p).eigenvalues);
    else out.spectra.emplace_back();
  }
  out.met = true;
  const RVector* first = nullptr;
  for (const auto& s : out.spectra) {
    if (s.size() == 0) continue;
    if (first == nullptr) {
      first = &s;
      continue;
    }
    if ((s - *first).cwiseAbs().maxCoeff() > NumericPolicy::spectrum_match) out.met = false;
  }
  return out;
}

EqualityCheck check_equality_condition(const PartitionedPureState& state, const SearchConfig& cfg) {
  return equality_condition_for_basis(state, eof_projective(state, cfg).basis);
}

BoundReport evaluate_bounds(const PartitionedPureState& state, const Hamiltonian& h,
                            const ProjectiveMeasurement& m, const FeedbackPolicy& policy,
                            const SearchConfig& cfg) {
  const auto run = run_protocol(state, m, policy, h);
  const ProjectiveMeasurement seeded[] = {m};
  const auto eof = eof_projective(state, cfg, seeded);

  BoundReport r;
  r.E_ext = run.E_ext;
  r.E_S_initial = run.E_S_initial;
  r.E_S_final = run.E_S_final;
  r.S_initial = run.S_initial;
  r.S_final = run.S_final;
  r.delta_S = run.delta_S;
  r.I_QC = run.I_QC;
  r.E_F = eof.value;
  r.E_SA_asym = run.S_initial - eof.value;
  r.eof_basis = eof.basis;
  const auto eq = equality_condition_for_basis(state, eof.basis);
  r.equality_condition_met = eq.met;
  r.eof_spectra = eq.spectra;

  const auto beta = solve_beta_eff(h, eof.value);
  r.beta_status = beta.status;
  if (!beta.finite()) return r;

  const double b = beta.beta;
  const auto g = gibbs(h, b);
  const DensityMatrix& rho_i = run.ensemble.initial_system;
  const double d = gibbs_divergence(rho_i, g);

  r.beta_eff = b;
  r.D_initial = d;
  r.bound_first = (d + r.I_QC) / b;
  r.bound_second = (d + r.E_SA_asym) / b;
  r.gap_first = *r.bound_first - r.E_ext;
  r.gap_second = *r.bound_second - r.E_ext;

  // Free-energy form: F(rho_i) - F(sigma) + I_QC / beta.
  const double free_initial = r.E_S_initial - r.S_initial / b;
  const double free_form = free_initial - g.helmholtz + r.I_QC / b;
  if (std::abs(free_form - *r.bound_first) >
      NumericPolicy::bound_forms * std::max(1.0, std::abs(free_form))) {
    std::ostringstream os;
    os.precision(17);
    os << "evaluate_bounds: free-energy form " << free_form << " disagrees with divergence form "
       << *r.bound_first;
    throw std::logic_error(os.str());
  }
  return r;
}

}  // namespace qfb
