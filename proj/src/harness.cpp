#include "qfb/harness.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>

#include "qfb/info_metrics.hpp"
#include "qfb/parallel.hpp"

namespace qfb {

namespace {

const json& require(const json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) {
    throw InputError(where + ": missing field '" + key + "'");
  }
  return j.at(key);
}

std::vector<int> int_list(const json& j, const std::string& field) {
  if (!j.is_array()) throw InputError("field '" + field + "': expected an array of integers");
  std::vector<int> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number_integer()) {
      throw InputError("field '" + field + "[" + std::to_string(i) + "]': expected an integer");
    }
    out.push_back(j[i].get<int>());
  }
  return out;
}

CVector complex_list(const json& j, const std::string& field) {
  if (!j.is_array()) throw InputError("field '" + field + "': expected an array of [re, im] pairs");
  CVector out(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    const json& e = j[i];
    if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number()) {
      throw InputError("field '" + field + "[" + std::to_string(i) + "]': expected [re, im] pair");
    }
    out(static_cast<Eigen::Index>(i)) = Complex(e[0].get<double>(), e[1].get<double>());
  }
  return out;
}

json complex_pair(Complex z) { return json::array({z.real(), z.imag()}); }

json optional_number(const std::optional<double>& v) {
  return v && std::isfinite(*v) ? json(*v) : json(nullptr);
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

CVector gaussian_vector(Eigen::Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  CVector v(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const double re = g(rng);
    const double im = g(rng);
    v(k) = Complex(re, im);
  }
  return v;
}

CMatrix haar_unitary(int d, std::mt19937_64& rng) {
  CMatrix z(d, d);
  for (int c = 0; c < d; ++c) z.col(c) = gaussian_vector(d, rng);
  Eigen::HouseholderQR<CMatrix> qr(z);
  CMatrix q = qr.householderQ() * CMatrix::Identity(d, d);
  const CMatrix r = qr.matrixQR();
  for (int k = 0; k < d; ++k) {
    const Complex rk = r(k, k);
    if (std::abs(rk) > 0.0) q.col(k) *= rk / std::abs(rk);
  }
  return q;
}

CMatrix random_hermitian(int d, std::mt19937_64& rng) {
  CMatrix g(d, d);
  for (int c = 0; c < d; ++c) g.col(c) = gaussian_vector(d, rng);
  return 0.5 * (g + g.adjoint());
}

std::mt19937_64 trial_rng(std::uint64_t seed, std::size_t index) {
  const auto idx = static_cast<std::uint64_t>(index);
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(idx), static_cast<std::uint32_t>(idx >> 32)};
  return std::mt19937_64(seq);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_double(const std::string& s, std::size_t line) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) {
    throw InputError("csv line " + std::to_string(line) + ": bad number '" + s + "'");
  }
  return v;
}

}  // namespace

// ---- files ---------------------------------------------------------------

PartitionedPureState parse_state(const json& j, bool renormalize) {
  const auto dims = int_list(require(j, "dims", "state file"), "dims");
  const json& roles_j = require(j, "roles", "state file");
  if (!roles_j.is_object()) throw InputError("field 'roles': expected an object");
  std::vector<Role> roles(dims.size(), Role::E);
  std::vector<int> seen(dims.size(), 0);
  for (const auto& [key, value] : roles_j.items()) {
    Role r;
    if (key == "S") r = Role::S;
    else if (key == "A") r = Role::A;
    else if (key == "E") r = Role::E;
    else throw InputError("field 'roles." + key + "': unknown role (expected S, A or E)");
    for (int i : int_list(value, "roles." + key)) {
      if (i < 0 || static_cast<std::size_t>(i) >= dims.size()) {
        throw InputError("field 'roles." + key + "': subsystem index " + std::to_string(i) + " out of range");
      }
      roles[i] = r;
      ++seen[i];
    }
  }
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (seen[i] != 1) {
      throw InputError("field 'roles': subsystem " + std::to_string(i) + " must have exactly one role");
    }
  }
  CVector amp = complex_list(require(j, "amplitudes", "state file"), "amplitudes");
  try {
    HilbertLayout layout(dims, roles);
    if (static_cast<std::size_t>(amp.size()) != layout.total_dimension()) {
      throw InputError("field 'amplitudes': " + std::to_string(amp.size()) + " entries, expected " +
                       std::to_string(layout.total_dimension()));
    }
    const double norm = amp.norm();
    if (!renormalize && std::abs(norm - 1.0) > NumericPolicy::file_norm) {
      std::ostringstream os;
      os.precision(17);
      os << "field 'amplitudes': norm " << norm << " is not 1 (pass --renormalize to rescale)";
      throw InputError(os.str());
    }
    // Amplitudes already normalized to working precision are kept bit-exact.
    if (std::abs(norm - 1.0) <= NumericPolicy::state_norm) {
      return PartitionedPureState(std::move(layout), std::move(amp));
    }
    return PartitionedPureState::normalized(std::move(layout), std::move(amp));
  } catch (const DomainError& e) {
    throw InputError(std::string("state file: ") + e.what());
  }
}

Hamiltonian parse_hamiltonian(const json& j) {
  const auto dims = int_list(require(j, "dims", "hamiltonian file"), "dims");
  const int d = std::accumulate(dims.begin(), dims.end(), 1, std::multiplies<>());
  const CMatrix m = matrix_from_json(require(j, "entries", "hamiltonian file"), d, d, "entries");
  try {
    return Hamiltonian(m);
  } catch (const DomainError& e) {
    throw InputError(std::string("hamiltonian file: ") + e.what());
  }
}

CMatrix matrix_from_json(const json& j, Eigen::Index rows, Eigen::Index cols, const std::string& field) {
  const CVector flat = complex_list(j, field);
  if (flat.size() != rows * cols) {
    throw InputError("field '" + field + "': " + std::to_string(flat.size()) + " entries, expected " +
                     std::to_string(rows * cols));
  }
  CMatrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = flat(r * cols + c);
  }
  return m;
}

json matrix_to_json(const CMatrix& m) {
  json out = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) out.push_back(complex_pair(m(r, c)));
  }
  return out;
}

json state_to_json(const PartitionedPureState& s) {
  json roles = json::object();
  for (Role r : {Role::S, Role::A, Role::E}) {
    const auto idx = s.layout().subsystems(r);
    if (!idx.empty()) roles[std::string(1, role_name(r))] = idx;
  }
  json amp = json::array();
  for (Eigen::Index k = 0; k < s.amplitudes().size(); ++k) amp.push_back(complex_pair(s.amplitudes()(k)));
  return {{"dims", s.layout().dims()}, {"roles", roles}, {"amplitudes", amp}};
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError(path + ": " + e.what());
  }
}

// ---- serialization -------------------------------------------------------

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json RunManifest::to_json() const {
  return {{"command", command}, {"seed", seed}, {"config", config}, {"version", version}};
}

std::string RunManifest::comment_line() const { return "# " + to_json().dump(); }

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows, const RunManifest& manifest) {
  os << manifest.comment_line() << '\n' << kSweepColumns << '\n';
  for (const auto& r : rows) {
    os << format_double(r.eta) << ',' << format_double(r.E_F) << ',' << format_double(r.beta_eff) << ','
       << format_double(r.D_term) << ',' << format_double(r.E_SA_term) << ','
       << format_double(r.bound_second) << ',' << format_double(r.max_E_ext) << ','
       << format_double(r.gap) << ',' << r.status << '\n';
  }
}

std::vector<SweepRow> read_sweep_csv(std::istream& is) {
  std::vector<SweepRow> rows;
  std::string line;
  std::size_t lineno = 0;
  bool header = false;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      if (line != kSweepColumns) throw InputError("csv line " + std::to_string(lineno) + ": unexpected header");
      header = true;
      continue;
    }
    const auto cells = split_csv_line(line);
    if (cells.size() != 9) {
      throw InputError("csv line " + std::to_string(lineno) + ": expected 9 columns");
    }
    SweepRow r;
    r.eta = parse_double(cells[0], lineno);
    r.E_F = parse_double(cells[1], lineno);
    r.beta_eff = parse_double(cells[2], lineno);
    r.D_term = parse_double(cells[3], lineno);
    r.E_SA_term = parse_double(cells[4], lineno);
    r.bound_second = parse_double(cells[5], lineno);
    r.max_E_ext = parse_double(cells[6], lineno);
    r.gap = parse_double(cells[7], lineno);
    r.status = cells[8];
    rows.push_back(std::move(r));
  }
  return rows;
}

json sweep_to_json(const std::vector<SweepRow>& rows, const RunManifest& manifest) {
  json arr = json::array();
  for (const auto& r : rows) {
    arr.push_back({{"eta", r.eta},
                   {"E_F", number_or_null(r.E_F)},
                   {"beta_eff", number_or_null(r.beta_eff)},
                   {"D_term", number_or_null(r.D_term)},
                   {"E_SA_term", number_or_null(r.E_SA_term)},
                   {"bound_second", number_or_null(r.bound_second)},
                   {"max_E_ext", number_or_null(r.max_E_ext)},
                   {"gap", number_or_null(r.gap)},
                   {"status", r.status}});
  }
  return {{"manifest", manifest.to_json()}, {"rows", arr}};
}

json search_config_to_json(const SearchConfig& cfg) {
  return {{"grid_points", cfg.grid_points},
          {"multistarts", cfg.multistarts},
          {"tolerance", cfg.tolerance},
          {"max_iterations", cfg.max_iterations},
          {"seed", cfg.seed}};
}

namespace {

SearchConfig search_config_from_json(const json& j, SearchConfig fallback) {
  if (!j.is_object()) return fallback;
  fallback.grid_points = j.value("grid_points", fallback.grid_points);
  fallback.multistarts = j.value("multistarts", fallback.multistarts);
  fallback.tolerance = j.value("tolerance", fallback.tolerance);
  fallback.max_iterations = j.value("max_iterations", fallback.max_iterations);
  fallback.seed = j.value("seed", fallback.seed);
  return fallback;
}

json spectra_to_json(const std::vector<RVector>& spectra) {
  json out = json::array();
  for (const auto& s : spectra) {
    json row = json::array();
    for (Eigen::Index k = 0; k < s.size(); ++k) row.push_back(s(k));
    out.push_back(row);
  }
  return out;
}

}  // namespace

json report_to_json(const BoundReport& r) {
  return {{"E_ext", r.E_ext},
          {"E_S_initial", r.E_S_initial},
          {"E_S_final", r.E_S_final},
          {"S_initial", r.S_initial},
          {"S_final", r.S_final},
          {"delta_S", r.delta_S},
          {"I_QC", r.I_QC},
          {"E_F", r.E_F},
          {"E_SA_asym", r.E_SA_asym},
          {"status", r.defined() ? "defined" : "undefined"},
          {"beta_status", beta_status_name(r.beta_status)},
          {"beta_eff", optional_number(r.beta_eff)},
          {"D_initial", optional_number(r.D_initial)},
          {"bound_first", optional_number(r.bound_first)},
          {"bound_second", optional_number(r.bound_second)},
          {"gap_first", optional_number(r.gap_first)},
          {"gap_second", optional_number(r.gap_second)},
          {"equality_condition_met", r.equality_condition_met},
          {"eof_measurement", matrix_to_json(r.eof_basis)},
          {"eof_post_spectra", spectra_to_json(r.eof_spectra)}};
}

// ---- verification campaigns ----------------------------------------------

std::vector<std::string> check_report(const BoundReport& r) {
  std::vector<std::string> v;
  const double tol = kViolationTolerance;
  auto fmt = [](double x) { return format_double(x); };
  if (-r.delta_S > r.I_QC + tol) v.push_back("-dS_S = " + fmt(-r.delta_S) + " > I_QC = " + fmt(r.I_QC));
  if (r.I_QC > r.E_SA_asym + tol) v.push_back("I_QC = " + fmt(r.I_QC) + " > E_SA = " + fmt(r.E_SA_asym));
  if (r.defined()) {
    if (r.E_ext > *r.bound_first + tol) {
      v.push_back("E_ext = " + fmt(r.E_ext) + " > bound_first = " + fmt(*r.bound_first));
    }
    if (*r.bound_first > *r.bound_second + tol) {
      v.push_back("bound_first = " + fmt(*r.bound_first) + " > bound_second = " + fmt(*r.bound_second));
    }
    if (*r.gap_second < kNearEqualityGap && !r.equality_condition_met) {
      v.push_back("gap_second = " + fmt(*r.gap_second) + " but post spectra depend on the outcome");
    }
  }
  return v;
}

namespace {

TrialRecord finish_trial(std::size_t index, PartitionedPureState state, Hamiltonian h, CMatrix basis,
                         std::vector<CMatrix> policy, const SearchConfig& search) {
  const auto m = ProjectiveMeasurement::from_basis(basis);
  auto report = evaluate_bounds(state, h, m, FeedbackPolicy(policy), search);
  auto violations = check_report(report);
  return TrialRecord{index,          std::move(state),  std::move(h),
                     std::move(basis), std::move(policy), search,
                     std::move(report), std::move(violations)};
}

}  // namespace

TrialRecord run_trial(const VerifyConfig& cfg, std::size_t index) {
  auto rng = trial_rng(cfg.seed, index);
  SearchConfig search = cfg.search;
  search.seed = rng();

  if (cfg.campaign == Campaign::Symmetric) {
    auto state = build_family_state(sample_symmetric_family(rng));
    auto h = example_hamiltonian();
    CMatrix basis = maximize_extraction(state, h, search).basis;
    const auto policy = optimal_policy(measure(state, ProjectiveMeasurement::from_basis(basis)), h);
    std::vector<CMatrix> us;
    for (std::size_t mu = 0; mu < policy.size(); ++mu) us.push_back(policy.unitary(mu));
    return finish_trial(index, std::move(state), std::move(h), std::move(basis), std::move(us), search);
  }

  auto layout = HilbertLayout::system_ancilla_rest(cfg.dims);
  auto state = PartitionedPureState::normalized(layout, gaussian_vector(layout.total_dimension(), rng));
  Hamiltonian h(random_hermitian(layout.role_dimension(Role::S), rng));
  CMatrix basis = haar_unitary(layout.role_dimension(Role::A), rng);
  const auto policy = optimal_policy(measure(state, ProjectiveMeasurement::from_basis(basis)), h);
  std::vector<CMatrix> us;
  for (std::size_t mu = 0; mu < policy.size(); ++mu) us.push_back(policy.unitary(mu));
  return finish_trial(index, std::move(state), std::move(h), std::move(basis), std::move(us), search);
}

json trial_to_json(const TrialRecord& t) {
  json policy = json::array();
  for (const auto& u : t.policy) policy.push_back(matrix_to_json(u));
  return {{"index", t.index},
          {"search", search_config_to_json(t.search)},
          {"violations", t.violations},
          {"report", report_to_json(t.report)},
          {"replay",
           {{"state", state_to_json(t.state)},
            {"hamiltonian",
             {{"dims", std::vector<int>{t.hamiltonian.dimension()}},
              {"entries", matrix_to_json(t.hamiltonian.matrix())}}},
            {"measurement_basis", matrix_to_json(t.measurement_basis)},
            {"policy", policy}}}};
}

TrialRecord replay_trial(const json& j, const SearchConfig& search) {
  const json& rp = require(j, "replay", "trial");
  auto state = parse_state(require(rp, "state", "replay"), false);
  auto h = parse_hamiltonian(require(rp, "hamiltonian", "replay"));
  const int da = state.layout().role_dimension(Role::A);
  const int ds = state.layout().role_dimension(Role::S);
  CMatrix basis = matrix_from_json(require(rp, "measurement_basis", "replay"), da, da, "measurement_basis");
  const json& pj = require(rp, "policy", "replay");
  if (!pj.is_array()) throw InputError("field 'policy': expected an array of matrices");
  std::vector<CMatrix> policy;
  for (std::size_t mu = 0; mu < pj.size(); ++mu) {
    policy.push_back(matrix_from_json(pj[mu], ds, ds, "policy[" + std::to_string(mu) + "]"));
  }
  const SearchConfig cfg = search_config_from_json(j.value("search", json()), search);
  const std::size_t index = j.value("index", std::size_t{0});
  return finish_trial(index, std::move(state), std::move(h), std::move(basis), std::move(policy), cfg);
}

VerifySummary run_verify(const VerifyConfig& cfg) {
  if (cfg.trials < 1) throw InputError("trials must be >= 1");
  cfg.search.validate();
  std::vector<std::optional<TrialRecord>> slots(cfg.trials);
  parallel_for(slots.size(), cfg.workers, [&](std::size_t i) { slots[i].emplace(run_trial(cfg, i)); });
  VerifySummary s;
  s.trials.reserve(slots.size());
  for (auto& slot : slots) {
    auto& t = *slot;
    if (!t.violations.empty()) ++s.violations;
    if (t.report.defined() && *t.report.gap_second < kNearEqualityGap) ++s.near_equality;
    s.trials.push_back(std::move(t));
  }
  return s;
}

json verify_to_json(const VerifySummary& s, const RunManifest& manifest) {
  json trials = json::array();
  for (const auto& t : s.trials) {
    trials.push_back(trial_to_json(t));
  }
  return {{"manifest", manifest.to_json()},
          {"summary",
           {{"trials", s.trials.size()}, {"violations", s.violations}, {"near_equality", s.near_equality}}},
          {"trials", trials}};
}

void write_verify_csv(std::ostream& os, const VerifySummary& s, const RunManifest& manifest) {
  os << manifest.comment_line() << '\n';
  os << "index,E_ext,I_QC,E_F,E_SA_asym,delta_S,beta_eff,D_initial,bound_first,bound_second,"
        "gap_first,gap_second,equality_condition_met,status,violations\n";
  auto opt = [](const std::optional<double>& v) {
    return format_double(v ? *v : std::numeric_limits<double>::quiet_NaN());
  };
  for (const auto& t : s.trials) {
    const auto& r = t.report;
    os << t.index << ',' << format_double(r.E_ext) << ',' << format_double(r.I_QC) << ','
       << format_double(r.E_F) << ',' << format_double(r.E_SA_asym) << ',' << format_double(r.delta_S)
       << ',' << opt(r.beta_eff) << ',' << opt(r.D_initial) << ',' << opt(r.bound_first) << ','
       << opt(r.bound_second) << ',' << opt(r.gap_first) << ',' << opt(r.gap_second) << ','
       << (r.equality_condition_met ? "true" : "false") << ','
       << (r.defined() ? "defined" : "undefined") << ',' << t.violations.size() << '\n';
  }
}

// ---- single-state report -------------------------------------------------

json make_report(const PartitionedPureState& state, const Hamiltonian& h, const SearchConfig& cfg) {
  const auto best = maximize_extraction(state, h, cfg);
  const auto m = best.measurement();
  const auto policy = optimal_policy(measure(state, m), h);
  const auto r = evaluate_bounds(state, h, m, policy, cfg);

  json measurement = {{"basis", matrix_to_json(best.basis)}, {"parameters", best.parameters}};
  if (const auto n = best.bloch_vector()) measurement["bloch_vector"] = {n->x(), n->y(), n->z()};
  json pol = json::array();
  for (std::size_t mu = 0; mu < policy.size(); ++mu) pol.push_back(matrix_to_json(policy.unitary(mu)));

  json out = report_to_json(r);
  out["max_E_ext"] = best.value;
  out["optimizer_converged"] = best.converged;
  out["measurement"] = measurement;
  out["policy"] = pol;
  return out;
}

}  // namespace qfb
