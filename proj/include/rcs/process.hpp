#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "rcs/cluster.hpp"
#include "rcs/core.hpp"
#include "rcs/laws.hpp"
#include "rcs/rng.hpp"

namespace rcs {

// Full description of a delayed renewal cluster process.
struct ProcessSpec {
  std::optional<InterarrivalLaw> delay;  // law of the first epoch; nullopt means 0
  InterarrivalLaw interarrival;
  ClusterModel cluster;
  ClusterModel delay_cluster;  // cluster attached to the first epoch
  bool include_parents = false;

  double mean_interarrival() const { return interarrival.mean(); }
  std::string describe() const;
};

struct SamplingOptions {
  std::uint64_t runaway_cap = 100'000'000;  // arrivals per replication
};

// Simulation margin beyond the observation window, sized from the upper
// tail of the cluster radius.
struct GuardBand {
  double width = 0.0;
  double radius_quantile = 0.0;  // pilot (1 - delta) quantile of R
  double delta = 1e-4;
  // Pilot estimate of the expected number of points per window edge that
  // belong to parents outside the simulated region: E[L (R - width)^+] / mu.
  double bias_estimate = 0.0;
};

struct GuardOptions {
  double delta = 1e-4;
  std::size_t pilot_draws = 10'000;
  double inflation = 1.25;  // width = inflation * quantile
};

// Pilot-based guard band; deterministic in `seed`.
GuardBand guard_band(const ProcessSpec& spec, std::uint64_t seed, const GuardOptions& opts = {});

// One draw of the interarrival law.
inline double sample_interarrival(const InterarrivalLaw& law, RngStream& rng) {
  return law.sample(rng);
}

// One cluster given the interarrival x preceding its epoch.
inline std::vector<double> sample_cluster(const ClusterModel& model, double x, RngStream& rng) {
  return model.sample(x, rng);
}

// Delayed marked renewal process: first epoch from the delay law, then
// i.i.d. interarrivals until the first epoch beyond horizon + guard (which
// is not included). Each arrival's cluster is drawn given its own
// interarrival; the first arrival uses delay_cluster.
MarkedPattern sample_delayed_marked_renewal(const ProcessSpec& spec, double horizon, double guard,
                                            RngStream& rng, const SamplingOptions& opts = {});

struct ClusterSample {
  PointPattern pattern;
  std::size_t overflow = 0;          // generated points outside the window
  std::size_t truncation_tally = 0;  // sampled clusters whose radius exceeded the guard
  std::size_t parents = 0;           // parent epochs generated
};

// Renewal cluster process restricted to (window_lo, window_hi]. Parents are
// generated on [0, window_hi + guard]; clusters of parents earlier than
// window_lo - guard are not sampled, except the first epoch's cluster which
// is always included.
ClusterSample sample_renewal_cluster_process(const ProcessSpec& spec, double window_lo,
                                             double window_hi, const GuardBand& guard,
                                             RngStream& rng, const SamplingOptions& opts = {});

// Same, with a guard band piloted from rng.seed().
ClusterSample sample_renewal_cluster_process(const ProcessSpec& spec, double window_lo,
                                             double window_hi, RngStream& rng);

// Poisson(rate) parents with zero delay, parents included, and clusters whose
// k-th point sits at the sum of the first k i.i.d. steps after the parent.
ProcessSpec bartlett_lewis_preset(double rate, SizeLaw size, InterarrivalLaw step);

// Uniform(0, 5) renewal parents starting at 0 with an empty first cluster;
// cluster size Poisson(0.5) when the preceding interarrival exceeds 1 and
// Poisson(5) otherwise, each point at interarrival + N(0, 1) after the parent.
// Long-run intensity 1.4 / 2.5 = 0.56.
ProcessSpec threshold_uniform_preset();

// Homogeneous Poisson(rate) parents with no cluster points; parents included.
ProcessSpec poisson_preset(double rate);

}  // namespace rcs
