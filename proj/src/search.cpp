#include "qfb/search.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "qfb/info_metrics.hpp"

namespace qfb {

void SearchConfig::validate() const {
  if (grid_points < 1) throw DomainError("search config: grid_points must be >= 1");
  if (multistarts < 1) throw DomainError("search config: multistarts must be >= 1");
  if (max_iterations < 1) throw DomainError("search config: max_iterations must be >= 1");
  if (!(tolerance > 0.0)) throw DomainError("search config: tolerance must be > 0");
}

namespace {

std::vector<CMatrix> gell_mann_with_identity(int d) {
  std::vector<CMatrix> out;
  for (int j = 0; j < d; ++j) {
    for (int k = j + 1; k < d; ++k) {
      CMatrix s = CMatrix::Zero(d, d);
      s(j, k) = 1.0;
      s(k, j) = 1.0;
      out.push_back(s);
      CMatrix a = CMatrix::Zero(d, d);
      a(j, k) = Complex(0.0, -1.0);
      a(k, j) = Complex(0.0, 1.0);
      out.push_back(a);
    }
  }
  for (int l = 1; l < d; ++l) {
    CMatrix g = CMatrix::Zero(d, d);
    const double c = std::sqrt(2.0 / (l * (l + 1.0)));
    for (int j = 0; j < l; ++j) g(j, j) = c;
    g(l, l) = -c * l;
    out.push_back(g);
  }
  out.push_back(CMatrix::Identity(d, d));
  return out;
}

// exp(i g) for Hermitian g.
CMatrix unitary_exponential(const CMatrix& g) {
  const auto spec = eig_hermitian(g);
  CVector phases(spec.eigenvalues.size());
  for (Eigen::Index k = 0; k < phases.size(); ++k) phases(k) = std::polar(1.0, spec.eigenvalues(k));
  return spec.eigenvectors * phases.asDiagonal() * spec.eigenvectors.adjoint();
}

double radical_inverse(std::uint64_t i, int base) {
  double inv = 1.0 / base, f = inv, r = 0.0;
  while (i > 0) {
    r += f * static_cast<double>(i % base);
    i /= base;
    f *= inv;
  }
  return r;
}

std::vector<int> first_primes(std::size_t n) {
  std::vector<int> ps;
  for (int c = 2; ps.size() < n; ++c) {
    bool prime = true;
    for (int p : ps) {
      if (p * p > c) break;
      if (c % p == 0) {
        prime = false;
        break;
      }
    }
    if (prime) ps.push_back(c);
  }
  return ps;
}

struct Start {
  std::vector<double> x;
  CMatrix reference;
};

// Minimizes objective(basis) over rank-1 bases of a d-dimensional ancilla.
OptimizationOutcome minimize_over_bases(int d, const std::function<double(const CMatrix&)>& objective,
                                        const SearchConfig& cfg, const std::vector<CMatrix>& seeded) {
  cfg.validate();
  if (d < 2) throw DomainError("search: ancilla dimension must be >= 2");
  const BasisParameterization param(d);
  const std::size_t np = param.parameter_count();
  const CMatrix id = CMatrix::Identity(d, d);
  std::size_t evaluations = 0;

  // Coarse scan.
  std::vector<Start> grid;
  grid.reserve(cfg.grid_points);
  if (d == 2) {
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < cfg.grid_points; ++i) {
      const double z = 1.0 - 2.0 * (i + 0.5) / cfg.grid_points;
      const double phi = std::fmod(i * golden, 2.0 * std::numbers::pi);
      grid.push_back({{std::acos(z), phi}, id});
    }
  } else {
    const auto primes = first_primes(np);
    for (int i = 0; i < cfg.grid_points; ++i) {
      std::vector<double> x(np);
      for (std::size_t k = 0; k < np; ++k) {
        x[k] = std::numbers::pi * (2.0 * radical_inverse(i + 1, primes[k]) - 1.0);
      }
      grid.push_back({std::move(x), id});
    }
  }
  std::vector<double> grid_values(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    grid_values[i] = objective(param.unitary(grid[i].x, grid[i].reference));
    ++evaluations;
  }
  std::vector<std::size_t> order(grid.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return grid_values[a] < grid_values[b]; });

  std::vector<Start> starts;
  const std::size_t from_grid = std::min<std::size_t>((cfg.multistarts + 1) / 2, grid.size());
  for (std::size_t i = 0; i < from_grid; ++i) starts.push_back(grid[order[i]]);

  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  while (starts.size() < static_cast<std::size_t>(cfg.multistarts)) {
    std::vector<double> x(np);
    if (d == 2) {
      x[0] = std::acos(1.0 - 2.0 * unit(rng));
      x[1] = 2.0 * std::numbers::pi * unit(rng);
    } else {
      for (auto& v : x) v = std::numbers::pi * (2.0 * unit(rng) - 1.0);
    }
    starts.push_back({std::move(x), id});
  }

  for (const auto& basis : seeded) {
    if (basis.rows() != d) throw DomainError("search: seeded measurement has wrong dimension");
    if (d == 2) starts.push_back({BasisParameterization::bloch_angles(basis.col(0)), id});
    else starts.push_back({std::vector<double>(np, 0.0), basis});
  }

  const double step = d == 2 ? 0.25 : 0.5;
  OptimizationOutcome best;
  bool have_best = false;
  for (const auto& st : starts) {
    const CMatrix& ref = st.reference;
    auto f = [&](std::span<const double> x) { return objective(param.unitary(x, ref)); };
    auto r = detail::nelder_mead(f, st.x, step, cfg.tolerance, cfg.max_iterations);
    evaluations += r.evaluations;
    // Restart from the best vertex until the value stops moving.
    for (int restart = 0; restart < 5 && r.converged; ++restart) {
      auto again = detail::nelder_mead(f, r.x, step * 0.2, cfg.tolerance, cfg.max_iterations);
      evaluations += again.evaluations;
      const bool improved = again.value < r.value - cfg.tolerance;
      if (again.value < r.value) r = again;
      else r.converged = r.converged && again.converged;
      if (!improved) break;
    }
    if (!have_best || r.value < best.value) {
      best.value = r.value;
      best.parameters = r.x;
      best.reference = ref;
      best.converged = r.converged;
      have_best = true;
    }
  }
  best.basis = param.unitary(best.parameters, best.reference);
  best.evaluations = evaluations;
  return best;
}

}  // namespace

BasisParameterization::BasisParameterization(int dim) : dim_(dim) {
  if (dim < 2) throw DomainError("parameterization: dimension must be >= 2");
  if (dim > 2) generators_ = gell_mann_with_identity(dim);
}

Eigen::Vector3d BasisParameterization::bloch_vector(double theta, double phi) {
  return {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)};
}

CMatrix BasisParameterization::bloch_basis(double theta, double phi) {
  const double c = std::cos(0.5 * theta), s = std::sin(0.5 * theta);
  const Complex e = std::polar(1.0, phi);
  CMatrix u(2, 2);
  u << c, -std::conj(e) * s, e * s, c;
  return u;
}

std::vector<double> BasisParameterization::bloch_angles(const CVector& v) {
  const CVector w = v.normalized();
  const Complex p01 = w(0) * std::conj(w(1));
  const double nx = 2.0 * p01.real(), ny = -2.0 * p01.imag();
  const double nz = std::norm(w(0)) - std::norm(w(1));
  return {std::acos(std::clamp(nz, -1.0, 1.0)), std::atan2(ny, nx)};
}

CMatrix BasisParameterization::unitary(std::span<const double> x, const CMatrix& reference) const {
  if (x.size() != parameter_count()) throw DomainError("parameterization: wrong parameter count");
  if (dim_ == 2) return bloch_basis(x[0], x[1]);
  CMatrix g = CMatrix::Zero(dim_, dim_);
  for (std::size_t k = 0; k < generators_.size(); ++k) g += x[k] * generators_[k];
  return reference * unitary_exponential(g);
}

CMatrix BasisParameterization::unitary(std::span<const double> x) const {
  return unitary(x, CMatrix::Identity(dim_, dim_));
}

ProjectiveMeasurement BasisParameterization::measurement(std::span<const double> x,
                                                         const CMatrix& reference) const {
  return ProjectiveMeasurement::from_basis(unitary(x, reference));
}

std::optional<Eigen::Vector3d> OptimizationOutcome::bloch_vector() const {
  if (basis.rows() != 2) return std::nullopt;
  const auto a = BasisParameterization::bloch_angles(basis.col(0));
  return BasisParameterization::bloch_vector(a[0], a[1]);
}

namespace detail {

double passive_energy(const RVector& rho_eigs_ascending, const RVector& h_eigs_ascending) {
  const Eigen::Index n = rho_eigs_ascending.size();
  double e = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) e += rho_eigs_ascending(n - 1 - k) * h_eigs_ascending(k);
  return e;
}

double average_entropy_for_basis(const AncillaBlocks& blocks, const CMatrix& u) {
  double total = 0.0;
  for (Eigen::Index k = 0; k < u.cols(); ++k) {
    const CMatrix rho = rank1_post_state(blocks, u.col(k));
    const double p = rho.trace().real();
    if (p <= NumericPolicy::zero_probability) continue;
    total += p * spectral_entropy(eig_hermitian(rho / p).eigenvalues);
  }
  return total;
}

NelderMeadResult nelder_mead(const std::function<double(std::span<const double>)>& f,
                             std::vector<double> start, double step, double tolerance,
                             int max_iterations) {
  const std::size_t n = start.size();
  std::vector<std::vector<double>> pts(n + 1, start);
  for (std::size_t i = 0; i < n; ++i) pts[i + 1][i] += step;
  std::vector<double> vals(n + 1);
  NelderMeadResult out;
  for (std::size_t i = 0; i <= n; ++i) {
    vals[i] = f(pts[i]);
    ++out.evaluations;
  }

  std::vector<std::size_t> idx(n + 1);
  auto eval = [&](const std::vector<double>& x) {
    ++out.evaluations;
    return f(x);
  };
  auto along = [&](const std::vector<double>& c, const std::vector<double>& x, double t) {
    std::vector<double> y(n);
    for (std::size_t k = 0; k < n; ++k) y[k] = c[k] + t * (x[k] - c[k]);
    return y;
  };

  for (int iter = 0; iter < max_iterations; ++iter) {
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
    const std::size_t lo = idx.front(), hi = idx.back(), second = idx[n - 1];
    if (vals[hi] - vals[lo] <= tolerance) {
      out.converged = true;
      break;
    }
    std::vector<double> c(n, 0.0);
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == hi) continue;
      for (std::size_t k = 0; k < n; ++k) c[k] += pts[i][k] / static_cast<double>(n);
    }
    auto xr = along(c, pts[hi], -1.0);
    const double fr = eval(xr);
    if (fr < vals[lo]) {
      auto xe = along(c, pts[hi], -2.0);
      const double fe = eval(xe);
      if (fe < fr) {
        pts[hi] = std::move(xe);
        vals[hi] = fe;
      } else {
        pts[hi] = std::move(xr);
        vals[hi] = fr;
      }
      continue;
    }
    if (fr < vals[second]) {
      pts[hi] = std::move(xr);
      vals[hi] = fr;
      continue;
    }
    bool shrink = false;
    if (fr < vals[hi]) {
      auto xc = along(c, xr, 0.5);
      const double fc = eval(xc);
      if (fc <= fr) {
        pts[hi] = std::move(xc);
        vals[hi] = fc;
      } else {
        shrink = true;
      }
    } else {
      auto xc = along(c, pts[hi], 0.5);
      const double fc = eval(xc);
      if (fc < vals[hi]) {
        pts[hi] = std::move(xc);
        vals[hi] = fc;
      } else {
        shrink = true;
      }
    }
    if (shrink) {
      for (std::size_t i = 0; i <= n; ++i) {
        if (i == lo) continue;
        pts[i] = along(pts[lo], pts[i], 0.5);
        vals[i] = eval(pts[i]);
      }
    }
  }

  const auto best = static_cast<std::size_t>(std::min_element(vals.begin(), vals.end()) - vals.begin());
  out.x = pts[best];
  out.value = vals[best];
  return out;
}

}  // namespace detail

FeedbackChoice optimal_feedback(const DensityMatrix& rho, const Hamiltonian& h) {
  if (rho.dimension() != h.dimension()) throw DomainError("optimal_feedback: dimension mismatch");
  const auto r = eig_hermitian(rho.matrix());
  const auto w = eig_hermitian(h.matrix());
  const Eigen::Index n = rho.dimension();
  CMatrix u = CMatrix::Zero(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    u += w.eigenvectors.col(k) * r.eigenvectors.col(n - 1 - k).adjoint();
  }
  return {u, detail::passive_energy(r.eigenvalues, w.eigenvalues)};
}

FeedbackPolicy optimal_policy(const OutcomeEnsemble& ens, const Hamiltonian& h) {
  std::vector<CMatrix> us;
  us.reserve(ens.outcomes.size());
  for (const auto& o : ens.outcomes) {
    if (o.present()) us.push_back(optimal_feedback(*o.system_state, h).unitary);
    else us.push_back(CMatrix::Identity(h.dimension(), h.dimension()));
  }
  return FeedbackPolicy(std::move(us));
}

double daemonic_ergotropy(const PartitionedPureState& state, const ProjectiveMeasurement& m,
                          const Hamiltonian& h) {
  const auto ens = measure(state, m);
  const RVector h_eigs = eig_hermitian(h.matrix()).eigenvalues;
  double final_energy = 0.0;
  for (const auto& o : ens.outcomes) {
    if (!o.present()) continue;
    final_energy += o.probability *
                    detail::passive_energy(eig_hermitian(o.system_state->matrix()).eigenvalues, h_eigs);
  }
  return h.energy(ens.initial_system) - final_energy;
}

OptimizationOutcome maximize_extraction(const PartitionedPureState& state, const Hamiltonian& h,
                                        const SearchConfig& cfg) {
  const auto blocks = state.ancilla_blocks();
  if (h.dimension() != blocks.dim_s) throw DomainError("maximize_extraction: dimension mismatch");
  const RVector h_eigs = eig_hermitian(h.matrix()).eigenvalues;
  const double initial = h.energy(state.system_state());
  // The passive energy is linear in rho, so unnormalized post states can be
  // used directly.
  auto negative_extraction = [&](const CMatrix& u) {
    double final_energy = 0.0;
    for (Eigen::Index k = 0; k < u.cols(); ++k) {
      const CMatrix rho = detail::rank1_post_state(blocks, u.col(k));
      final_energy += detail::passive_energy(eig_hermitian(rho).eigenvalues, h_eigs);
    }
    return final_energy - initial;
  };
  auto out = minimize_over_bases(blocks.dim_a, negative_extraction, cfg, {});
  out.value = -out.value;
  return out;
}

OptimizationOutcome eof_projective(const PartitionedPureState& state, const SearchConfig& cfg,
                                   std::span<const ProjectiveMeasurement> seeded) {
  const auto blocks = state.ancilla_blocks();
  std::vector<CMatrix> seeds;
  for (const auto& m : seeded) {
    if (m.dimension() != blocks.dim_a) throw DomainError("eof_projective: seeded measurement dimension");
    seeds.push_back(m.refinement_basis());
  }
  auto objective = [&](const CMatrix& u) { return detail::average_entropy_for_basis(blocks, u); };
  return minimize_over_bases(blocks.dim_a, objective, cfg, seeds);
}

double asymmetric_entanglement(const PartitionedPureState& state, const SearchConfig& cfg,
                               std::span<const ProjectiveMeasurement> seeded) {
  return von_neumann_entropy(state.system_state()) - eof_projective(state, cfg, seeded).value;
}

}  // namespace qfb
