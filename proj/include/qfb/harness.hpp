#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "qfb/fourqubit.hpp"

namespace qfb {

using json = nlohmann::json;

inline constexpr const char* kVersion = "0.1.0";

// Malformed input file or argument (CLI exit status 2).
class InputError : public std::runtime_error {
 public:
  explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

// ---- files ---------------------------------------------------------------

// {"dims": [...], "roles": {"S": [...], "A": [...], "E": [...]},
//  "amplitudes": [[re, im], ...]}
PartitionedPureState parse_state(const json& j, bool renormalize);
// {"dims": [...], "entries": [[re, im], ...]} in row-major order.
Hamiltonian parse_hamiltonian(const json& j);

json state_to_json(const PartitionedPureState& s);
json matrix_to_json(const CMatrix& m);
CMatrix matrix_from_json(const json& j, Eigen::Index rows, Eigen::Index cols, const std::string& field);

// Reads and parses a JSON file; parse errors carry line/column.
json read_json_file(const std::string& path);

// ---- serialization -------------------------------------------------------

// 17 significant digits; NaN as "nan".
std::string format_double(double v);

inline constexpr const char* kSweepColumns =
    "eta,E_F,beta_eff,D_term,E_SA_term,bound_second,max_E_ext,gap,status";

struct RunManifest {
  std::string command;
  std::uint64_t seed = 0;
  json config = json::object();
  std::string version = kVersion;

  json to_json() const;
  std::string comment_line() const;  // "# {...}"
};

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows, const RunManifest& manifest);
std::vector<SweepRow> read_sweep_csv(std::istream& is);
json sweep_to_json(const std::vector<SweepRow>& rows, const RunManifest& manifest);

json search_config_to_json(const SearchConfig& cfg);
json report_to_json(const BoundReport& r);

// ---- verification campaigns ----------------------------------------------

enum class Campaign {
  Random,     // Gaussian random states, Haar random measurement, random H on S
  Symmetric,  // four-qubit family states with outcome-independent spectra,
              // optimal measurement, H = sigma^z
};

struct VerifyConfig {
  int trials = 1000;
  std::uint64_t seed = 42;
  std::vector<int> dims{2, 2, 2, 2};  // S = {0}, A = {1}, E = rest
  Campaign campaign = Campaign::Random;
  SearchConfig search{};
  int workers = 1;
};

inline constexpr double kViolationTolerance = 1e-8;
inline constexpr double kNearEqualityGap = 1e-6;

struct TrialRecord {
  std::size_t index = 0;
  PartitionedPureState state;
  Hamiltonian hamiltonian;
  CMatrix measurement_basis;
  std::vector<CMatrix> policy;
  SearchConfig search;
  BoundReport report;
  std::vector<std::string> violations;
};

// Bound-chain and equality-condition checks on one report.
std::vector<std::string> check_report(const BoundReport& r);

TrialRecord run_trial(const VerifyConfig& cfg, std::size_t index);

// Re-runs a trial serialized by trial_to_json.
TrialRecord replay_trial(const json& j, const SearchConfig& search);

json trial_to_json(const TrialRecord& t);

struct VerifySummary {
  std::vector<TrialRecord> trials;
  std::size_t violations = 0;
  std::size_t near_equality = 0;
};

VerifySummary run_verify(const VerifyConfig& cfg);

json verify_to_json(const VerifySummary& s, const RunManifest& manifest);
void write_verify_csv(std::ostream& os, const VerifySummary& s, const RunManifest& manifest);

// ---- single-state report -------------------------------------------------

json make_report(const PartitionedPureState& state, const Hamiltonian& h, const SearchConfig& cfg);

}  // namespace qfb
