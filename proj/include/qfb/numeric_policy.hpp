#pragma once

#include <stdexcept>
#include <string>

namespace qfb {

// Every tolerance used by the library lives here so tests and library agree.
struct NumericPolicy {
  static constexpr double hermiticity = 1e-10;
  static constexpr double hermiticity_eig = 1e-8;
  static constexpr double trace = 1e-10;
  static constexpr double psd_floor = -1e-10;
  static constexpr double reconstruction = 1e-9;
  static constexpr double state_norm = 1e-10;
  static constexpr double file_norm = 1e-8;
  static constexpr double projector = 1e-10;
  static constexpr double unitarity = 1e-10;

  // Jacobi stops once the off-diagonal Frobenius mass drops below this.
  static constexpr double jacobi_offdiag = 1e-14;
  static constexpr int jacobi_max_sweeps = 100;

  // Eigenvalues below this are treated as exact zeros (0 ln 0 := 0).
  static constexpr double rank_cutoff = 1e-12;
  static constexpr double support_residual = 1e-9;

  static constexpr double zero_probability = 1e-14;
  static constexpr double spectrum_probability = 1e-10;
  static constexpr double spectrum_match = 1e-8;

  static constexpr double free_energy_identity = 1e-9;
  static constexpr double bound_forms = 1e-10;

  static constexpr double beta_target_margin = 1e-10;
  static constexpr double beta_entropy = 1e-12;
  static constexpr int beta_max_bisections = 300;
  static constexpr int beta_max_doublings = 200;

  static constexpr double family_condition = 1e-10;
  static constexpr double family_norm = 1e-12;
};

// Raised for inputs outside an operation's domain (bad index, non-Hermitian
// matrix, dimension mismatch, ...).
class DomainError : public std::invalid_argument {
 public:
  explicit DomainError(const std::string& what) : std::invalid_argument(what) {}
};

}  // namespace qfb
