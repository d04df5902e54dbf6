#include "qfb/info_metrics.hpp"

#include <cmath>

namespace qfb {

double spectral_entropy(const RVector& eigenvalues) {
  double s = 0.0;
  for (Eigen::Index k = 0; k < eigenvalues.size(); ++k) {
    const double l = eigenvalues(k);
    if (l > NumericPolicy::rank_cutoff) s -= l * std::log(l);
  }
  return s;
}

double von_neumann_entropy(const DensityMatrix& rho) {
  return std::max(0.0, spectral_entropy(eig_hermitian(rho.matrix()).eigenvalues));
}

Divergence kl_divergence(const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (rho.dims() != sigma.dims()) throw DomainError("kl_divergence: dimension mismatch");
  const auto r = eig_hermitian(rho.matrix());
  const auto s = eig_hermitian(sigma.matrix());
  const Eigen::Index n = rho.dimension();

  // Projector onto sigma's support.
  CMatrix support = CMatrix::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    if (s.eigenvalues(j) > NumericPolicy::rank_cutoff) {
      support += s.eigenvectors.col(j) * s.eigenvectors.col(j).adjoint();
    }
  }

  double value = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double li = r.eigenvalues(i);
    if (li <= NumericPolicy::rank_cutoff) continue;
    const CVector ri = r.eigenvectors.col(i);
    if ((ri - support * ri).norm() >= NumericPolicy::support_residual) return Divergence{};
    value += li * std::log(li);
    for (Eigen::Index j = 0; j < n; ++j) {
      const double mj = s.eigenvalues(j);
      if (mj <= NumericPolicy::rank_cutoff) continue;
      value -= li * std::norm(ri.dot(s.eigenvectors.col(j))) * std::log(mj);
    }
  }
  return Divergence{value};
}

}  // namespace qfb
