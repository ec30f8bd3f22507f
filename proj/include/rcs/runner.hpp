#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "rcs/config.hpp"
#include "rcs/estimators.hpp"

namespace rcs {

// Exit statuses of the command-line runner.
enum ExitStatus : int {
  kExitPass = 0,
  kExitAcceptanceFailure = 1,
  kExitConfigError = 2,
  kExitRuntimeError = 3,
};

struct ExperimentOutcome {
  bool passed = false;
  std::vector<ExperimentReport> reports;
  // File name -> UTF-8 contents (LF line endings). Always contains
  // report.csv, report.jsonl and manifest.json.
  std::map<std::string, std::string> artifacts;
  std::vector<std::string> summary;  // human-readable lines
};

// Stream id shared by all replications of one experiment kind.
std::uint64_t experiment_stream_id(ExperimentKind kind);

// Runs the configured experiment. Results depend on (config, seed) only;
// `threads` affects wall time.
ExperimentOutcome run_experiment(const ExperimentConfig& cfg, unsigned threads = 1);

// Writes every artifact under `dir`, creating it if needed.
void write_artifacts(const ExperimentOutcome& outcome, const std::filesystem::path& dir);

}  // namespace rcs
