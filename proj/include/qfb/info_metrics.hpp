#pragma once

#include <optional>

#include "qfb/tensor.hpp"

namespace qfb {

// All entropic quantities are in nats.

double von_neumann_entropy(const DensityMatrix& rho);

// -sum lambda ln lambda over a spectrum, with 0 ln 0 := 0 below the rank
// cutoff.
double spectral_entropy(const RVector& eigenvalues);

// Quantum relative entropy tr rho (ln rho - ln sigma). An empty value means
// the divergence is infinite because rho has support outside sigma's.
struct Divergence {
  std::optional<double> value;

  bool infinite() const { return !value.has_value(); }
};

Divergence kl_divergence(const DensityMatrix& rho, const DensityMatrix& sigma);

}  // namespace qfb
