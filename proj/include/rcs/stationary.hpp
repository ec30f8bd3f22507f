#pragma once

#include <cstddef>
#include <vector>

#include "rcs/core.hpp"
#include "rcs/process.hpp"
#include "rcs/rng.hpp"
#include "rcs/stats.hpp"

namespace rcs {

struct SizeBiasOptions {
  // Candidate pool for laws without a finite essential supremum; 0 disables
  // the fallback. The pool resample has O(1/pool_size) bias.
  std::size_t pool_size = 4096;
};

struct SizeBiasedMark {
  MarkedArrival mark;        // epoch 0; interarrival is X*
  bool approximate = false;  // drawn by the weighted-pool fallback
};

// Mark drawn from the law of (W, X) biased by X: E f(W*) = E[X f(W)] / mu.
// Exact rejection sampling against the essential supremum when the law has
// one; weighted-pool resampling otherwise. Throws InvalidArgument when the
// law is unbounded and the pool is disabled.
SizeBiasedMark sample_size_biased_mark(const ProcessSpec& spec, RngStream& rng,
                                       const SizeBiasOptions& opts = {});

// Rejection step in isolation: draws `draw()` until a value x is accepted
// with probability weight(x) / bound.
template <class Draw, class Weight>
auto size_biased_rejection(Draw&& draw, Weight&& weight, double bound, RngStream& rng) {
  for (;;) {
    auto v = draw();
    if (rng.uniform() * bound < weight(v)) return v;
  }
}

struct TwoSidedMarkedPattern {
  MarkedPattern pattern;
  std::size_t origin_index = 0;  // index of T_0, the first epoch >= 0
  bool approximate = false;      // size-biased mark came from the pool fallback

  const MarkedArrival& origin() const { return pattern.arrivals()[origin_index]; }
};

// Stationary marked renewal process on (window_lo - guard, window_hi + guard]:
// T_0 = U X*, T_-1 = -(1 - U) X*, marks W_0 = W* and i.i.d. ordinary marks
// elsewhere. T_0 and T_-1 are always present.
TwoSidedMarkedPattern sample_stationary_marked_renewal(const ProcessSpec& spec, double window_lo,
                                                       double window_hi, double guard,
                                                       RngStream& rng,
                                                       const SizeBiasOptions& opts = {},
                                                       const SamplingOptions& sampling = {});

// Stationary renewal cluster process restricted to (window_lo, window_hi].
ClusterSample sample_stationary_cluster_process(const ProcessSpec& spec, double window_lo,
                                                double window_hi, const GuardBand& guard,
                                                RngStream& rng, const SizeBiasOptions& opts = {},
                                                const SamplingOptions& sampling = {});

struct PointStationarityReport {
  std::size_t k = 0;
  std::size_t coordinates = 0;        // m interarrivals followed by m cluster sizes
  std::vector<KsReport> per_coordinate;
  double max_distance = 0.0;
  double max_critical_value = 0.0;
  bool reject = false;                // any coordinate rejected
};

// Compares the next m interarrivals and cluster sizes after recentering a
// zero-anchored process at its k-th epoch against those after the origin.
PointStationarityReport point_stationary_check(const ProcessSpec& spec, std::size_t k,
                                               std::size_t n_rep, const RngStream& rng,
                                               std::size_t m = 3, double alpha = 0.01);

}  // namespace rcs
