#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "qfb/numeric_policy.hpp"

namespace qfb {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

enum class Role { S, A, E };

char role_name(Role r);

// Subsystem dimensions plus an S/A/E role per subsystem.
//
// Basis index of the level assignment (b_0, ..., b_{n-1}) is
//   k = sum_i b_i * prod_{j>i} dims[j],
// i.e. subsystem 0 is the most significant digit. For qubits, level 0 is
// spin up and level 1 is spin down.
class HilbertLayout {
 public:
  HilbertLayout(std::vector<int> dims, std::vector<Role> roles,
                bool allow_empty_environment = false);

  // Common case: S = {0}, A = {1}, E = everything else.
  static HilbertLayout system_ancilla_rest(std::vector<int> dims);

  const std::vector<int>& dims() const { return dims_; }
  const std::vector<Role>& roles() const { return roles_; }
  std::size_t subsystem_count() const { return dims_.size(); }
  std::size_t total_dimension() const { return total_; }

  std::vector<int> subsystems(Role r) const;
  std::vector<int> role_dims(Role r) const;
  int role_dimension(Role r) const;

  std::vector<int> digits(std::size_t index) const;
  std::size_t index(std::span<const int> digits) const;

  bool operator==(const HilbertLayout&) const = default;

 private:
  std::vector<int> dims_;
  std::vector<Role> roles_;
  std::size_t total_ = 1;
};

// Hermitian, PSD, unit-trace matrix with its subsystem dimension list.
class DensityMatrix {
 public:
  // Validates hermiticity, trace and the PSD floor.
  DensityMatrix(std::vector<int> dims, CMatrix entries);

  static DensityMatrix pure(std::vector<int> dims, const CVector& ket);

  const std::vector<int>& dims() const { return dims_; }
  const CMatrix& matrix() const { return entries_; }
  Eigen::Index dimension() const { return entries_.rows(); }

 private:
  struct Unchecked {};
  DensityMatrix(std::vector<int> dims, CMatrix entries, Unchecked);
  friend DensityMatrix partial_trace(const DensityMatrix&, std::vector<int>);

  std::vector<int> dims_;
  CMatrix entries_;
};

// The amplitude tensor regrouped as psi(s, a, e): one dS x dE block per
// ancilla basis level a.
struct AncillaBlocks {
  int dim_s = 0;
  int dim_a = 0;
  int dim_e = 0;
  std::vector<CMatrix> blocks;
};

// Inverse of PartitionedPureState::ancilla_blocks.
CVector assemble_amplitudes(const HilbertLayout& layout, const AncillaBlocks& blocks);

class PartitionedPureState {
 public:
  // Rejects amplitude vectors whose norm differs from 1 by more than
  // NumericPolicy::state_norm.
  PartitionedPureState(HilbertLayout layout, CVector amplitudes);

  static PartitionedPureState normalized(HilbertLayout layout, CVector amplitudes);

  const HilbertLayout& layout() const { return layout_; }
  const CVector& amplitudes() const { return amplitudes_; }

  DensityMatrix density() const;
  AncillaBlocks ancilla_blocks() const;
  DensityMatrix system_state() const;

 private:
  HilbertLayout layout_;
  CVector amplitudes_;
};

struct HermitianSpectrum {
  RVector eigenvalues;   // ascending
  CMatrix eigenvectors;  // columns match eigenvalues
};

CMatrix kron(const CMatrix& a, const CMatrix& b);

// Reduced state on `keep` (kept subsystems appear in their original order).
DensityMatrix partial_trace(const DensityMatrix& rho, std::vector<int> keep);

// Cyclic complex Jacobi; the input must be Hermitian within
// NumericPolicy::hermiticity_eig.
HermitianSpectrum eig_hermitian(const CMatrix& m);

// V f(diag lambda) V^dagger. Throws DomainError when f is not finite on the
// spectrum.
CMatrix hermitian_function(const CMatrix& m, const std::function<double(double)>& f);

double max_hermitian_deviation(const CMatrix& m);
double max_abs_deviation(const CMatrix& a, const CMatrix& b);

CVector basis_ket(int dim, int level);

namespace pauli {
CMatrix identity(int dim = 2);
CMatrix x();
CMatrix y();
CMatrix z();
}  // namespace pauli

}  // namespace qfb
