#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "rcs/estimators.hpp"
#include "rcs/process.hpp"

namespace rcs {

// Flat `key = value` configuration. Blank lines and lines starting with '#'
// are ignored. Keys are tracked as they are read so that leftovers can be
// reported as unknown.
class KeyValueConfig {
 public:
  KeyValueConfig() = default;
  explicit KeyValueConfig(std::map<std::string, std::string> entries)
      : entries_(std::move(entries)) {}

  static KeyValueConfig parse(std::istream& in);
  static KeyValueConfig parse_string(const std::string& text);

  bool has(const std::string& key) const { return entries_.count(key) != 0; }
  void set(const std::string& key, const std::string& value) { entries_[key] = value; }

  // Throw ConfigError when missing or malformed.
  std::string get_string(const std::string& key) const;
  double get_double(const std::string& key) const;
  std::uint64_t get_uint(const std::string& key) const;
  bool get_bool(const std::string& key) const;
  std::vector<double> get_list(const std::string& key) const;

  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  std::uint64_t get_uint(const std::string& key, std::uint64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;

  // Keys never read, optionally ignoring a prefix such as "experiment.".
  std::vector<std::string> unread(const std::string& ignore_prefix = "") const;
  const std::map<std::string, std::string>& entries() const noexcept { return entries_; }

 private:
  const std::string* find(const std::string& key) const;

  std::map<std::string, std::string> entries_;
  mutable std::set<std::string> read_;
};

// Process keys:
//   interarrival.kind    exponential | uniform | gamma | mixture
//   <law>.rate | <law>.lo, <law>.hi | <law>.shape, <law>.scale
//   <law>.components = n, <law>.<i>.weight, <law>.<i>.kind, ...
//   delay.kind           zero (default) or any law kind
//   cluster.kind         empty | iid | bartlett_lewis | threshold
//   cluster.size.kind    constant (cluster.size.value) | poisson (cluster.size.mean)
//   cluster.offset.kind  constant (.value) | normal (.mean, .sd) | uniform (.lo, .hi)
//   cluster.step.*       law keys (bartlett_lewis)
//   cluster.threshold, cluster.mean_above, cluster.mean_below, cluster.offset_sd
//   delay_cluster.kind   empty (default) | same | any cluster kind
//   include_parents      true | false (default false)
ProcessSpec parse_process_spec(const KeyValueConfig& cfg);

// Inverse of parse_process_spec.
KeyValueConfig process_spec_to_config(const ProcessSpec& spec);

enum class ExperimentKind {
  WindowMean,
  Elementary,
  RecurrenceCdf,
  VoidProb,
  RenewalFunction,
  KeyRenewal,
  Coupling,
  StationarityCheck,
  FlipTest,
};

const char* to_string(ExperimentKind kind);
ExperimentKind parse_experiment_kind(const std::string& name);

// Parameters for all experiment kinds; each kind reads the ones it needs.
struct ExperimentParams {
  double t = 200.0;
  double x = 1.0;
  std::vector<double> x_grid;
  std::vector<double> t_grid;
  std::vector<StepPiece> g;
  double epsilon = 0.0;  // 0 means 0.01 * mean interarrival
  std::uint64_t steps_cap = 10'000'000;
  std::size_t k_checks = 100;
  double min_coupled = 0.99;
  std::vector<double> shifts{0.0, 37.7, 200.0};
  double length = 1.0;
  std::size_t n = 20;
  double alpha = 0.01;
  double level = 0.997;
  double band = 4.0;                      // acceptance band in standard errors
  std::optional<double> abs_tolerance;    // overrides band when set
  double rel_tolerance = 0.02;            // key_renewal
};

struct ExperimentConfig {
  ProcessSpec spec;
  ExperimentKind kind = ExperimentKind::WindowMean;
  ExperimentParams params;
  std::size_t n_rep = 1000;
  std::uint64_t seed = 1;
  SamplingOptions sampling;
  GuardOptions guard;
  std::map<std::string, std::string> entries;  // as parsed, for the manifest
};

// Experiment keys live under `experiment.` (kind, t, x, x_grid, t_grid, g,
// epsilon, steps_cap, k_checks, min_coupled, shifts, length, n, alpha, level,
// band, abs_tolerance, rel_tolerance, reps, seed), plus guard.delta,
// guard.pilot_draws and sampling.runaway_cap. Unknown keys throw ConfigError.
ExperimentConfig parse_experiment_config(const KeyValueConfig& cfg);

}  // namespace rcs
