#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "rcs/process.hpp"
#include "rcs/rng.hpp"
#include "rcs/stats.hpp"

namespace rcs {

// One step index and the value of the walk V there.
struct WalkSample {
  std::uint64_t step = 0;
  double value = 0.0;
};

// Outcome of the symmetric-walk coupling between a stationary and a delayed
// marked renewal process driven by one shared i.i.d. sequence.
struct CouplingRun {
  double epsilon = 0.0;
  std::uint64_t steps_cap = 0;
  std::optional<std::uint64_t> tau;            // nullopt: cap exceeded
  std::optional<double> coupling_time;         // max(T_{L_tau}, T''_{L'_tau})
  std::vector<WalkSample> path;                // thinned beyond `full_path` steps
  double stationary_start = 0.0;               // T_0
  double delayed_start = 0.0;                  // T''_0
  std::uint64_t plus_count = 0;                // L_tau: +1 signs up to tau
  std::uint64_t minus_count = 0;               // L'_tau = tau - L_tau
  double stationary_epoch = 0.0;               // T_{L_tau}
  double delayed_epoch = 0.0;                  // T''_{L'_tau}

  bool capped() const noexcept { return !tau.has_value(); }
};

struct CouplingOptions {
  std::uint64_t steps_cap = 10'000'000;
  std::uint64_t full_path = 10'000;  // steps stored before thinning starts
};

// Drives V_i = T_0 - T''_0 + sum_{j<=i} theta_j X_j with Rademacher theta
// until V enters [0, epsilon) or the cap is reached. Each step draws X_j then
// theta_j from `walk`; on return `walk` is positioned just after step tau.
CouplingRun run_coupling_from(double stationary_start, double delayed_start,
                              const InterarrivalLaw& law, double epsilon, RngStream& walk,
                              const CouplingOptions& opts = {});

// Full construction: T_0 = U X* from the size-biased mark, T''_0 from the
// delay law (both from rng.split(0)), walk driven by rng.split(1), and the
// mark of shared index j drawn from rng.split(2).split(j).
CouplingRun run_coupling(const ProcessSpec& spec, double epsilon, const RngStream& rng,
                         const CouplingOptions& opts = {});

struct AgreementReport {
  CouplingRun run;
  bool coupled = false;                  // a finite tau was found under the cap
  std::uint64_t tau = 0;
  std::size_t checks = 0;
  std::vector<std::size_t> time_violations;  // k with T_{k+L} - T'_{k+L'} outside [0, eps)
  std::vector<std::size_t> mark_violations;  // k >= 1 with W_{k+L} != W'_{k+L'}

  bool passed() const noexcept {
    return coupled && time_violations.empty() && mark_violations.empty();
  }
};

// Reconstructs both processes past tau (the stationary one from its own
// +1 indices, the coupled delayed one by reusing the stationary increments and
// marks) and checks epoch closeness for k = 0..k_checks and mark equality for
// k = 1..k_checks.
AgreementReport post_coupling_agreement(const ProcessSpec& spec, double epsilon,
                                        std::size_t k_checks, const RngStream& rng,
                                        const CouplingOptions& opts = {});

enum class FlipRule {
  // Stopping time: index of the second +1 (no flip if it never occurs).
  SecondPlus,
  // Not a stopping time: first index of the running maximum over 1..n.
  PeekArgmax,
};

struct FlipTestReport {
  std::size_t n = 0;
  std::size_t n_rep = 0;
  FlipRule rule = FlipRule::SecondPlus;
  KsReport ks;
};

// Compares the law of sum_{j<=n} of Rademacher sequences with signs flipped
// after tau against unflipped sequences, on independent samples.
FlipTestReport rademacher_flip_test(std::size_t n, std::size_t n_rep, const RngStream& rng,
                                    FlipRule rule = FlipRule::SecondPlus, double alpha = 0.01);

// CSV: `epsilon,tau,coupling_time,capped`.
void write_coupling_csv(std::ostream& out, std::span<const CouplingRun> runs);

}  // namespace rcs
