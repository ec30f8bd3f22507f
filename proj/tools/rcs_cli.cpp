// rcs: command-line front end for simulation and verification experiments.
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "rcs/config.hpp"
#include "rcs/core.hpp"
#include "rcs/error.hpp"
#include "rcs/estimators.hpp"
#include "rcs/parallel.hpp"
#include "rcs/runner.hpp"
#include "rcs/stationary.hpp"

namespace fs = std::filesystem;
using namespace rcs;

namespace {

KeyValueConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return KeyValueConfig::parse(in);
}

struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> reps;
  std::string out = "rcs-out";
  unsigned threads = 0;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config, "key = value configuration file")->required();
  cmd->add_option("--seed", f.seed, "override experiment.seed");
  cmd->add_option("--reps", f.reps, "override experiment.reps");
  cmd->add_option("--out", f.out, "output directory");
  cmd->add_option("--threads", f.threads, "worker threads (default: RCS_THREADS or 1)");
}

int run_verify(const CommonFlags& f, KeyValueConfig cfg) {
  ExperimentConfig ec;
  try {
    if (f.seed) cfg.set("experiment.seed", std::to_string(*f.seed));
    if (f.reps) cfg.set("experiment.reps", std::to_string(*f.reps));
    ec = parse_experiment_config(cfg);
  } catch (const Error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfigError;
  }
  ExperimentOutcome outcome;
  try {
    outcome = run_experiment(ec, resolve_threads(f.threads));
    write_artifacts(outcome, f.out);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << '\n';
    return kExitRuntimeError;
  }
  for (const auto& line : outcome.summary) std::cout << line << '\n';
  return outcome.passed ? kExitPass : kExitAcceptanceFailure;
}

int run_simulate(const CommonFlags& f, const KeyValueConfig& cfg, double lo, double hi,
                 bool stationary, bool marked) {
  ProcessSpec spec;
  try {
    spec = parse_process_spec(cfg);
    for (const auto& k : cfg.unread()) {
      if (k.rfind("experiment.", 0) == 0 || k.rfind("guard.", 0) == 0 ||
          k.rfind("sampling.", 0) == 0)
        continue;
      throw ConfigError("unknown key '" + k + "'");
    }
    if (!(lo < hi)) throw ConfigError("--lo must be below --hi");
  } catch (const Error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfigError;
  }
  try {
    const std::uint64_t seed = f.seed.value_or(cfg.get_uint("experiment.seed", 1));
    RngStream rng(seed, hash_name("simulate"));
    const auto guard = guard_band(spec, seed);
    fs::create_directories(f.out);
    std::ofstream pattern_out(fs::path(f.out) / "pattern.csv", std::ios::binary);
    std::size_t overflow = 0, tally = 0;
    if (marked) {
      MarkedPattern m;
      if (stationary)
        m = sample_stationary_marked_renewal(spec, lo, hi, guard.width, rng).pattern;
      else
        m = sample_delayed_marked_renewal(spec, hi, guard.width, rng);
      std::ofstream marked_out(fs::path(f.out) / "marked.csv", std::ios::binary);
      write_csv(marked_out, m);
      const auto flat = flatten(m, spec.include_parents, Window{lo, hi});
      write_csv(pattern_out, flat.pattern);
      overflow = flat.overflow;
    } else {
      const auto sample = stationary ? sample_stationary_cluster_process(spec, lo, hi, guard, rng)
                                     : sample_renewal_cluster_process(spec, lo, hi, guard, rng);
      write_csv(pattern_out, sample.pattern);
      overflow = sample.overflow;
      tally = sample.truncation_tally;
    }
    nlohmann::ordered_json j;
    j["command"] = "simulate";
    j["seed"] = seed;
    j["window"] = {lo, hi};
    j["stationary"] = stationary;
    j["marked"] = marked;
    j["process"] = spec.describe();
    j["guard_width"] = guard.width;
    j["overflow"] = overflow;
    j["truncation_tally"] = tally;
    std::ofstream man(fs::path(f.out) / "manifest.json", std::ios::binary);
    man << j.dump(2) << '\n';
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << '\n';
    return kExitRuntimeError;
  }
  return kExitPass;
}

int run_report(const std::string& in_path) {
  fs::path p(in_path);
  if (fs::is_directory(p)) p /= "report.csv";
  std::ifstream in(p);
  if (!in) {
    std::cerr << "cannot open " << p << '\n';
    return kExitConfigError;
  }
  std::vector<ExperimentReport> reports;
  try {
    reports = read_report_csv(in);
  } catch (const Error& e) {
    std::cerr << "report error: " << e.what() << '\n';
    return kExitConfigError;
  }
  bool ok = true;
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const auto& r = reports[i];
    const bool inside = !r.target || (r.ci_low <= *r.target && *r.target <= r.ci_high);
    ok = ok && inside;
    std::cout << i << ": estimate=" << format_double(r.estimate) << " ci=["
              << format_double(r.ci_low) << ", " << format_double(r.ci_high) << "]";
    if (r.target) std::cout << " target=" << format_double(*r.target);
    std::cout << (inside ? "" : "  <- target outside CI") << '\n';
  }
  return ok ? kExitPass : kExitAcceptanceFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Renewal cluster process simulation and verification"};
  app.require_subcommand(1);

  CommonFlags sim_flags, verify_flags, coupling_flags;
  double lo = 0.0, hi = 100.0;
  bool stationary = false, marked = false;
  auto* sim = app.add_subcommand("simulate", "simulate one realization to CSV");
  add_common(sim, sim_flags);
  sim->add_option("--lo", lo, "window lower edge (exclusive)");
  sim->add_option("--hi", hi, "window upper edge (inclusive)");
  sim->add_flag("--stationary", stationary, "use the stationary version");
  sim->add_flag("--marked", marked, "also write the marked parent process");

  auto* verify = app.add_subcommand("verify", "run the configured experiment");
  add_common(verify, verify_flags);

  std::optional<double> epsilon;
  std::optional<std::uint64_t> cap;
  auto* coupling = app.add_subcommand("coupling", "run the coupling experiment");
  add_common(coupling, coupling_flags);
  coupling->add_option("--epsilon", epsilon, "closeness tolerance");
  coupling->add_option("--cap", cap, "walk step cap");

  std::string report_in;
  auto* report = app.add_subcommand("report", "summarize a report CSV");
  report->add_option("--in", report_in, "output directory or report.csv")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitConfigError;
  }

  try {
    if (*sim) return run_simulate(sim_flags, load_config(sim_flags.config), lo, hi, stationary, marked);
    if (*verify) return run_verify(verify_flags, load_config(verify_flags.config));
    if (*coupling) {
      auto cfg = load_config(coupling_flags.config);
      cfg.set("experiment.kind", "coupling");
      if (epsilon) cfg.set("experiment.epsilon", format_double(*epsilon));
      if (cap) cfg.set("experiment.steps_cap", std::to_string(*cap));
      return run_verify(coupling_flags, cfg);
    }
    if (*report) return run_report(report_in);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfigError;
  }
  return kExitConfigError;
}
