#include "qfb/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace qfb {

char role_name(Role r) {
  switch (r) {
    case Role::S: return 'S';
    case Role::A: return 'A';
    case Role::E: return 'E';
  }
  return '?';
}

HilbertLayout::HilbertLayout(std::vector<int> dims, std::vector<Role> roles,
                             bool allow_empty_environment)
    : dims_(std::move(dims)), roles_(std::move(roles)) {
  if (dims_.empty()) throw DomainError("layout needs at least one subsystem");
  if (dims_.size() != roles_.size()) {
    throw DomainError("layout: " + std::to_string(dims_.size()) + " dims but " +
                      std::to_string(roles_.size()) + " roles");
  }
  for (std::size_t i = 0; i < dims_.size(); ++i) {
    if (dims_[i] < 2) {
      throw DomainError("layout: subsystem " + std::to_string(i) + " has dimension " +
                        std::to_string(dims_[i]) + " (< 2)");
    }
    total_ *= static_cast<std::size_t>(dims_[i]);
  }
  auto count = [&](Role r) { return std::count(roles_.begin(), roles_.end(), r); };
  if (count(Role::S) == 0) throw DomainError("layout: no S subsystem");
  if (count(Role::A) == 0) throw DomainError("layout: no A subsystem");
  if (count(Role::E) == 0 && !allow_empty_environment) {
    throw DomainError("layout: empty environment not allowed");
  }
}

HilbertLayout HilbertLayout::system_ancilla_rest(std::vector<int> dims) {
  std::vector<Role> roles(dims.size(), Role::E);
  if (!roles.empty()) roles[0] = Role::S;
  if (roles.size() > 1) roles[1] = Role::A;
  return HilbertLayout(std::move(dims), std::move(roles), dims.size() == 2);
}

std::vector<int> HilbertLayout::subsystems(Role r) const {
  std::vector<int> out;
  for (std::size_t i = 0; i < roles_.size(); ++i) {
    if (roles_[i] == r) out.push_back(static_cast<int>(i));
  }
  return out;
}

std::vector<int> HilbertLayout::role_dims(Role r) const {
  std::vector<int> out;
  for (int i : subsystems(r)) out.push_back(dims_[i]);
  return out;
}

int HilbertLayout::role_dimension(Role r) const {
  int d = 1;
  for (int i : subsystems(r)) d *= dims_[i];
  return d;
}

std::vector<int> HilbertLayout::digits(std::size_t index) const {
  std::vector<int> out(dims_.size());
  for (std::size_t i = dims_.size(); i-- > 0;) {
    out[i] = static_cast<int>(index % dims_[i]);
    index /= dims_[i];
  }
  return out;
}

std::size_t HilbertLayout::index(std::span<const int> digits) const {
  std::size_t k = 0;
  for (std::size_t i = 0; i < dims_.size(); ++i) k = k * dims_[i] + digits[i];
  return k;
}

double max_hermitian_deviation(const CMatrix& m) {
  if (m.rows() != m.cols()) return INFINITY;
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

double max_abs_deviation(const CMatrix& a, const CMatrix& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

DensityMatrix::DensityMatrix(std::vector<int> dims, CMatrix entries)
    : dims_(std::move(dims)), entries_(std::move(entries)) {
  const long expected = std::accumulate(dims_.begin(), dims_.end(), 1L, std::multiplies<>());
  if (entries_.rows() != expected || entries_.cols() != expected) {
    throw DomainError("density matrix: shape does not match dims");
  }
  const double herm = max_hermitian_deviation(entries_);
  if (herm > NumericPolicy::hermiticity) {
    throw DomainError("density matrix: not Hermitian (deviation " + std::to_string(herm) + ")");
  }
  const double tr = entries_.trace().real();
  if (std::abs(tr - 1.0) > NumericPolicy::trace) {
    throw DomainError("density matrix: trace " + std::to_string(tr));
  }
  const auto spec = eig_hermitian(entries_);
  if (spec.eigenvalues(0) < NumericPolicy::psd_floor) {
    throw DomainError("density matrix: negative eigenvalue " + std::to_string(spec.eigenvalues(0)));
  }
}

DensityMatrix::DensityMatrix(std::vector<int> dims, CMatrix entries, Unchecked)
    : dims_(std::move(dims)), entries_(std::move(entries)) {}

DensityMatrix DensityMatrix::pure(std::vector<int> dims, const CVector& ket) {
  return DensityMatrix(std::move(dims), ket * ket.adjoint());
}

PartitionedPureState::PartitionedPureState(HilbertLayout layout, CVector amplitudes)
    : layout_(std::move(layout)), amplitudes_(std::move(amplitudes)) {
  if (static_cast<std::size_t>(amplitudes_.size()) != layout_.total_dimension()) {
    throw DomainError("state: " + std::to_string(amplitudes_.size()) +
                      " amplitudes for total dimension " +
                      std::to_string(layout_.total_dimension()));
  }
  const double n = amplitudes_.norm();
  if (std::abs(n - 1.0) > NumericPolicy::state_norm) {
    throw DomainError("state: norm " + std::to_string(n) + " differs from 1");
  }
}

PartitionedPureState PartitionedPureState::normalized(HilbertLayout layout, CVector amplitudes) {
  const double n = amplitudes.norm();
  if (!(n > 0.0)) throw DomainError("state: zero vector cannot be normalized");
  return PartitionedPureState(std::move(layout), amplitudes / n);
}

DensityMatrix PartitionedPureState::density() const {
  return DensityMatrix::pure(layout_.dims(), amplitudes_);
}

namespace {

struct SaeIndex {
  int s = 0, a = 0, e = 0;
};

SaeIndex split_index(const HilbertLayout& layout, std::size_t k) {
  const auto dg = layout.digits(k);
  const auto& dims = layout.dims();
  const auto& roles = layout.roles();
  SaeIndex out;
  for (std::size_t i = 0; i < dims.size(); ++i) {
    switch (roles[i]) {
      case Role::S: out.s = out.s * dims[i] + dg[i]; break;
      case Role::A: out.a = out.a * dims[i] + dg[i]; break;
      case Role::E: out.e = out.e * dims[i] + dg[i]; break;
    }
  }
  return out;
}

}  // namespace

AncillaBlocks PartitionedPureState::ancilla_blocks() const {
  AncillaBlocks out;
  out.dim_s = layout_.role_dimension(Role::S);
  out.dim_a = layout_.role_dimension(Role::A);
  out.dim_e = layout_.role_dimension(Role::E);
  out.blocks.assign(out.dim_a, CMatrix::Zero(out.dim_s, out.dim_e));
  for (std::size_t k = 0; k < layout_.total_dimension(); ++k) {
    const auto ix = split_index(layout_, k);
    out.blocks[ix.a](ix.s, ix.e) = amplitudes_(static_cast<Eigen::Index>(k));
  }
  return out;
}

CVector assemble_amplitudes(const HilbertLayout& layout, const AncillaBlocks& blocks) {
  CVector out(static_cast<Eigen::Index>(layout.total_dimension()));
  for (std::size_t k = 0; k < layout.total_dimension(); ++k) {
    const auto ix = split_index(layout, k);
    out(static_cast<Eigen::Index>(k)) = blocks.blocks.at(ix.a)(ix.s, ix.e);
  }
  return out;
}

DensityMatrix PartitionedPureState::system_state() const {
  const auto ab = ancilla_blocks();
  CMatrix rho = CMatrix::Zero(ab.dim_s, ab.dim_s);
  for (const auto& b : ab.blocks) rho += b * b.adjoint();
  rho = 0.5 * (rho + rho.adjoint());
  return DensityMatrix(layout_.role_dims(Role::S), std::move(rho));
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

DensityMatrix partial_trace(const DensityMatrix& rho, std::vector<int> keep) {
  const auto& dims = rho.dims();
  const int n = static_cast<int>(dims.size());
  if (keep.empty()) throw DomainError("partial_trace: keep set is empty");
  std::sort(keep.begin(), keep.end());
  keep.erase(std::unique(keep.begin(), keep.end()), keep.end());
  for (int k : keep) {
    if (k < 0 || k >= n) {
      throw DomainError("partial_trace: subsystem index " + std::to_string(k) +
                        " out of range [0, " + std::to_string(n) + ")");
    }
  }
  std::vector<bool> kept(n, false);
  for (int k : keep) kept[k] = true;

  std::vector<int> kept_dims;
  for (int k : keep) kept_dims.push_back(dims[k]);

  const Eigen::Index total = rho.dimension();
  std::vector<int> kept_index(total), traced_index(total);
  std::vector<int> dg(n);
  for (Eigen::Index k = 0; k < total; ++k) {
    Eigen::Index rem = k;
    for (int i = n; i-- > 0;) {
      dg[i] = static_cast<int>(rem % dims[i]);
      rem /= dims[i];
    }
    int ki = 0, ti = 0;
    for (int i = 0; i < n; ++i) {
      if (kept[i]) ki = ki * dims[i] + dg[i];
      else ti = ti * dims[i] + dg[i];
    }
    kept_index[k] = ki;
    traced_index[k] = ti;
  }

  const int kd = std::accumulate(kept_dims.begin(), kept_dims.end(), 1, std::multiplies<>());
  CMatrix out = CMatrix::Zero(kd, kd);
  const CMatrix& m = rho.matrix();
  for (Eigen::Index i = 0; i < total; ++i) {
    for (Eigen::Index j = 0; j < total; ++j) {
      if (traced_index[i] == traced_index[j]) out(kept_index[i], kept_index[j]) += m(i, j);
    }
  }
  return DensityMatrix(std::move(kept_dims), std::move(out), DensityMatrix::Unchecked{});
}

namespace {

double off_diagonal_mass(const CMatrix& a) {
  double s = 0.0;
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      if (i != j) s += std::norm(a(i, j));
    }
  }
  return std::sqrt(s);
}

}  // namespace

HermitianSpectrum eig_hermitian(const CMatrix& m) {
  if (m.rows() != m.cols()) throw DomainError("eig_hermitian: matrix is not square");
  const double herm = max_hermitian_deviation(m);
  if (!(herm <= NumericPolicy::hermiticity_eig)) {
    throw DomainError("eig_hermitian: matrix is not Hermitian (deviation " +
                      std::to_string(herm) + ")");
  }
  const Eigen::Index n = m.rows();
  CMatrix a = 0.5 * (m + m.adjoint());
  CMatrix v = CMatrix::Identity(n, n);
  const double scale = std::max(1.0, a.norm());

  for (int sweep = 0; sweep < NumericPolicy::jacobi_max_sweeps; ++sweep) {
    if (off_diagonal_mass(a) < NumericPolicy::jacobi_offdiag * scale) break;
    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double r = std::abs(a(p, q));
        if (r == 0.0) continue;
        // Rotate the phase of a_pq away, then apply a real Jacobi rotation.
        const Complex phase = a(p, q) / r;
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        const double tau = (aqq - app) / (2.0 * r);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        // J restricted to (p, q): [[c, s], [-s conj(phase), c conj(phase)]]
        const Complex jpp = c, jpq = s;
        const Complex jqp = -s * std::conj(phase), jqq = c * std::conj(phase);

        for (Eigen::Index k = 0; k < n; ++k) {
          const Complex akp = a(k, p), akq = a(k, q);
          a(k, p) = akp * jpp + akq * jqp;
          a(k, q) = akp * jpq + akq * jqq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const Complex apk = a(p, k), aqk = a(q, k);
          a(p, k) = std::conj(jpp) * apk + std::conj(jqp) * aqk;
          a(q, k) = std::conj(jpq) * apk + std::conj(jqq) * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        a(p, p) = a(p, p).real();
        a(q, q) = a(q, q).real();
        for (Eigen::Index k = 0; k < n; ++k) {
          const Complex vkp = v(k, p), vkq = v(k, q);
          v(k, p) = vkp * jpp + vkq * jqp;
          v(k, q) = vkp * jpq + vkq * jqq;
        }
      }
    }
  }

  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index i, Eigen::Index j) {
    return a(i, i).real() < a(j, j).real();
  });
  HermitianSpectrum out{RVector(n), CMatrix(n, n)};
  for (Eigen::Index k = 0; k < n; ++k) {
    out.eigenvalues(k) = a(order[k], order[k]).real();
    out.eigenvectors.col(k) = v.col(order[k]);
  }
  return out;
}

CMatrix hermitian_function(const CMatrix& m, const std::function<double(double)>& f) {
  const auto spec = eig_hermitian(m);
  RVector fx(spec.eigenvalues.size());
  for (Eigen::Index k = 0; k < fx.size(); ++k) {
    fx(k) = f(spec.eigenvalues(k));
    if (!std::isfinite(fx(k))) {
      std::ostringstream os;
      os << "hermitian_function: f undefined at eigenvalue " << spec.eigenvalues(k);
      throw DomainError(os.str());
    }
  }
  const CMatrix& v = spec.eigenvectors;
  return v * fx.cast<Complex>().asDiagonal() * v.adjoint();
}

CVector basis_ket(int dim, int level) {
  if (level < 0 || level >= dim) throw DomainError("basis_ket: level out of range");
  CVector k = CVector::Zero(dim);
  k(level) = 1.0;
  return k;
}

namespace pauli {

CMatrix identity(int dim) { return CMatrix::Identity(dim, dim); }

CMatrix x() {
  CMatrix m(2, 2);
  m << 0.0, 1.0, 1.0, 0.0;
  return m;
}

CMatrix y() {
  CMatrix m(2, 2);
  m << 0.0, Complex(0.0, -1.0), Complex(0.0, 1.0), 0.0;
  return m;
}

CMatrix z() {
  CMatrix m(2, 2);
  m << 1.0, 0.0, 0.0, -1.0;
  return m;
}

}  // namespace pauli

}  // namespace qfb
