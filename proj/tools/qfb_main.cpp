// qfb: command-line front end.
//
//   qfb sweep  --eta-min -0.99 --eta-max 0.99 --steps 199 --out sweep.csv
//   qfb verify --trials 1000 --seed 42 --dims 2,2,2,2 --out verify.json
//   qfb report state.json hamiltonian.json --out report.json
//
// Exit status: 0 success (undefined-limit rows included), 1 verified
// property violation, 2 usage or input error.

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "qfb/harness.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kViolation = 1;
constexpr int kUsage = 2;

std::vector<int> parse_dims(const std::string& spec) {
  std::vector<int> dims;
  std::stringstream ss(spec);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      std::size_t used = 0;
      const int d = std::stoi(tok, &used);
      if (used != tok.size()) throw std::invalid_argument(tok);
      dims.push_back(d);
    } catch (const std::exception&) {
      throw qfb::InputError("--dims: bad entry '" + tok + "'");
    }
  }
  if (dims.size() < 3) throw qfb::InputError("--dims: need at least S, A and one E subsystem");
  return dims;
}

// Writes `text` to `path` (stdout when empty). Returns false if the path is
// not writable.
bool emit(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return true;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) return false;
  out << text;
  return static_cast<bool>(out);
}

void emit_run_info(const std::string& out_path, const qfb::RunManifest& manifest, int workers,
                   std::chrono::steady_clock::time_point start) {
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  qfb::json info = manifest.to_json();
  info["workers"] = workers;
  info["duration_seconds"] = seconds;
  if (out_path.empty() || !emit(out_path + ".run.json", info.dump(2) + "\n")) {
    std::cerr << info.dump() << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Local energy extraction bounds under measurement and feedback"};
  app.require_subcommand(1);

  std::string out_path;
  std::string format = "csv";
  int workers = 1;
  std::uint64_t seed = 42;
  qfb::SearchConfig search;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--out", out_path, "Output file (stdout when omitted)");
    sub->add_option("--format", format, "Output format")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--seed", seed, "Seed for random sampling and multistarts");
    sub->add_option("--grid-points", search.grid_points, "Coarse-scan points")->check(CLI::PositiveNumber);
    sub->add_option("--multistarts", search.multistarts, "Local refinements")->check(CLI::PositiveNumber);
  };

  double eta_min = -0.99, eta_max = 0.99;
  int steps = 199;
  auto* sweep = app.add_subcommand("sweep", "Tightness sweep over the four-qubit eta family");
  sweep->add_option("--eta-min", eta_min, "Lower end of the eta grid");
  sweep->add_option("--eta-max", eta_max, "Upper end of the eta grid");
  sweep->add_option("--steps", steps, "Number of grid points (>= 2)");

  int trials = 1000;
  std::string dims_spec = "2,2,2,2";
  std::string campaign = "random";
  std::string replay_path;
  auto* verify = app.add_subcommand("verify", "Randomized bound-chain verification campaign");
  verify->add_option("--trials", trials, "Number of trials");
  verify->add_option("--dims", dims_spec, "Subsystem dims; S = 0, A = 1, E = rest");
  verify->add_option("--campaign", campaign, "State family")
      ->check(CLI::IsMember({"random", "symmetric"}));
  verify->add_option("--replay", replay_path, "Re-run one serialized trial");

  std::string state_path, hamiltonian_path;
  bool renormalize = false;
  auto* report = app.add_subcommand("report", "Full bound report for one state");
  report->add_option("state", state_path, "State file (JSON)")->required();
  report->add_option("hamiltonian", hamiltonian_path, "Hamiltonian file (JSON)")->required();
  report->add_flag("--renormalize", renormalize, "Rescale a non-normalized state");

  for (auto* sub : {sweep, verify, report}) add_common(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  const auto start = std::chrono::steady_clock::now();
  search.seed = seed;
  try {
    if (sweep->parsed()) {
      if (steps < 2) throw qfb::InputError("--steps must be >= 2");
      if (!(-1.0 < eta_min && eta_min < eta_max && eta_max < 1.0)) {
        throw qfb::InputError("need -1 < eta-min < eta-max < 1");
      }
      std::vector<double> grid;
      for (int i = 0; i < steps; ++i) {
        grid.push_back((eta_min * (steps - 1 - i) + eta_max * i) / (steps - 1));
      }
      const auto rows = qfb::sweep_eta(grid, search, workers);
      qfb::RunManifest manifest{"sweep", seed,
                                {{"eta_min", eta_min},
                                 {"eta_max", eta_max},
                                 {"steps", steps},
                                 {"search", qfb::search_config_to_json(search)}}};
      std::ostringstream os;
      if (format == "json") os << qfb::sweep_to_json(rows, manifest).dump(2) << '\n';
      else qfb::write_sweep_csv(os, rows, manifest);
      if (!emit(out_path, os.str())) {
        std::cerr << "error: cannot write '" << out_path << "'\n";
        return kUsage;
      }
      emit_run_info(out_path, manifest, workers, start);
      return kOk;
    }

    if (verify->parsed()) {
      if (!replay_path.empty()) {
        const auto t = qfb::replay_trial(qfb::read_json_file(replay_path), search);
        if (!emit(out_path, qfb::trial_to_json(t).dump(2) + "\n")) {
          std::cerr << "error: cannot write '" << out_path << "'\n";
          return kUsage;
        }
        return t.violations.empty() ? kOk : kViolation;
      }
      if (trials < 1) throw qfb::InputError("--trials must be >= 1");
      qfb::VerifyConfig cfg;
      cfg.trials = trials;
      cfg.seed = seed;
      cfg.dims = parse_dims(dims_spec);
      cfg.campaign = campaign == "symmetric" ? qfb::Campaign::Symmetric : qfb::Campaign::Random;
      cfg.search = search;
      cfg.workers = workers;
      const auto summary = qfb::run_verify(cfg);
      qfb::RunManifest manifest{"verify", seed,
                                {{"trials", trials},
                                 {"dims", cfg.dims},
                                 {"campaign", campaign},
                                 {"search", qfb::search_config_to_json(search)}}};
      std::ostringstream os;
      if (format == "json") os << qfb::verify_to_json(summary, manifest).dump(2) << '\n';
      else qfb::write_verify_csv(os, summary, manifest);
      if (!emit(out_path, os.str())) {
        std::cerr << "error: cannot write '" << out_path << "'\n";
        return kUsage;
      }
      if (summary.violations > 0) {
        qfb::json offending = qfb::json::array();
        for (const auto& t : summary.trials) {
          if (!t.violations.empty()) offending.push_back(qfb::trial_to_json(t));
        }
        const std::string vpath = (out_path.empty() ? std::string("verify") : out_path) + ".violations.json";
        emit(vpath, offending.dump(2) + "\n");
        std::cerr << summary.violations << " trial(s) violated the bound chain; see " << vpath << "\n";
      }
      emit_run_info(out_path, manifest, workers, start);
      return summary.violations == 0 ? kOk : kViolation;
    }

    if (report->parsed()) {
      const auto state = qfb::parse_state(qfb::read_json_file(state_path), renormalize);
      const auto h = qfb::parse_hamiltonian(qfb::read_json_file(hamiltonian_path));
      if (h.dimension() != state.layout().role_dimension(qfb::Role::S)) {
        throw qfb::InputError("hamiltonian dimension does not match the S subsystems");
      }
      qfb::RunManifest manifest{"report", seed,
                                {{"state", state_path},
                                 {"hamiltonian", hamiltonian_path},
                                 {"search", qfb::search_config_to_json(search)}}};
      qfb::json out = qfb::make_report(state, h, search);
      out["manifest"] = manifest.to_json();
      if (!emit(out_path, out.dump(2) + "\n")) {
        std::cerr << "error: cannot write '" << out_path << "'\n";
        return kUsage;
      }
      return kOk;
    }
  } catch (const qfb::InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const qfb::DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
