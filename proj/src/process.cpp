#include "rcs/process.hpp"

#include <algorithm>
#include <cmath>

#include "rcs/error.hpp"

namespace rcs {

std::string ProcessSpec::describe() const {
  return "delay=" + (delay ? delay->describe() : std::string("Zero")) +
         " interarrival=" + interarrival.describe() + " cluster=" + cluster.describe() +
         " delay_cluster=" + delay_cluster.describe() +
         " include_parents=" + (include_parents ? "true" : "false");
}

GuardBand guard_band(const ProcessSpec& spec, std::uint64_t seed, const GuardOptions& opts) {
  if (!(opts.delta > 0.0 && opts.delta < 1.0) || opts.pilot_draws == 0)
    throw InvalidArgument("guard band needs 0 < delta < 1 and at least one pilot draw");
  GuardBand g;
  g.delta = opts.delta;
  if (spec.cluster.is_empty()) return g;

  RngStream rng(seed, hash_name("guard-pilot"));
  std::vector<double> radius(opts.pilot_draws);
  std::vector<double> size(opts.pilot_draws);
  for (std::size_t i = 0; i < opts.pilot_draws; ++i) {
    const double x = spec.interarrival.sample(rng);
    const auto offsets = spec.cluster.sample(x, rng);
    double r = 0.0;
    for (double o : offsets) r = std::max(r, std::abs(o));
    radius[i] = r;
    size[i] = static_cast<double>(offsets.size());
  }
  std::vector<double> sorted = radius;
  std::sort(sorted.begin(), sorted.end());
  const auto n = sorted.size();
  auto idx = static_cast<std::size_t>(std::ceil((1.0 - opts.delta) * double(n)));
  idx = std::clamp<std::size_t>(idx, 1, n) - 1;
  g.radius_quantile = sorted[idx];
  g.width = opts.inflation * g.radius_quantile;

  double excess = 0.0;
  for (std::size_t i = 0; i < n; ++i) excess += size[i] * std::max(0.0, radius[i] - g.width);
  g.bias_estimate = excess / double(n) / spec.mean_interarrival();
  return g;
}

MarkedPattern sample_delayed_marked_renewal(const ProcessSpec& spec, double horizon, double guard,
                                            RngStream& rng, const SamplingOptions& opts) {
  if (!(horizon >= 0.0) || !(guard >= 0.0))
    throw InvalidArgument("horizon and guard must be nonnegative");
  const double stop = horizon + guard;
  std::vector<MarkedArrival> arrivals;

  const double x0 = spec.delay ? spec.delay->sample(rng) : 0.0;
  double epoch = x0;
  if (epoch > stop) return MarkedPattern({}, Window{0.0, stop});
  arrivals.push_back({epoch, spec.delay_cluster.sample(x0, rng), x0});

  for (;;) {
    const double x = spec.interarrival.sample(rng);
    epoch += x;
    if (epoch > stop) break;
    if (arrivals.size() >= opts.runaway_cap)
      throw RunawayError("arrival count exceeded the runaway cap of " +
                         std::to_string(opts.runaway_cap));
    arrivals.push_back({epoch, spec.cluster.sample(x, rng), x});
  }
  return MarkedPattern(std::move(arrivals), Window{0.0, stop});
}

ClusterSample sample_renewal_cluster_process(const ProcessSpec& spec, double window_lo,
                                             double window_hi, const GuardBand& guard,
                                             RngStream& rng, const SamplingOptions& opts) {
  if (!(window_lo < window_hi)) throw InvalidArgument("window needs lo < hi");
  const Window window{window_lo, window_hi};
  const double stop = window_hi + guard.width;
  const double skip_before = window_lo - guard.width;

  ClusterSample out;
  std::vector<double> pts;
  auto emit = [&](double t) {
    if (window.contains(t))
      pts.push_back(t);
    else
      ++out.overflow;
  };
  auto add_arrival = [&](double epoch, double x, const ClusterModel& model, bool always) {
    ++out.parents;
    if (spec.include_parents) emit(epoch);
    if (!always && epoch < skip_before) return;
    const auto offsets = model.sample(x, rng);
    double r = 0.0;
    for (double o : offsets) {
      r = std::max(r, std::abs(o));
      emit(epoch + o);
    }
    if (r > guard.width) ++out.truncation_tally;
  };

  // The first epoch's cluster is sampled even when the epoch lies beyond the
  // simulated region, since its offsets may reach back into the window.
  const double x0 = spec.delay ? spec.delay->sample(rng) : 0.0;
  double epoch = x0;
  add_arrival(epoch, x0, spec.delay_cluster, true);
  while (epoch <= stop) {
    const double x = spec.interarrival.sample(rng);
    epoch += x;
    if (epoch > stop) break;
    if (out.parents >= opts.runaway_cap)
      throw RunawayError("arrival count exceeded the runaway cap of " +
                         std::to_string(opts.runaway_cap));
    add_arrival(epoch, x, spec.cluster, false);
  }
  out.pattern = PointPattern(std::move(pts), window);
  return out;
}

ClusterSample sample_renewal_cluster_process(const ProcessSpec& spec, double window_lo,
                                             double window_hi, RngStream& rng) {
  return sample_renewal_cluster_process(spec, window_lo, window_hi, guard_band(spec, rng.seed()),
                                        rng);
}

ProcessSpec bartlett_lewis_preset(double rate, SizeLaw size, InterarrivalLaw step) {
  ProcessSpec spec;
  spec.interarrival = InterarrivalLaw::exponential(rate);
  spec.cluster = cluster::BartlettLewis{size, step};
  spec.delay_cluster = spec.cluster;
  spec.include_parents = true;
  return spec;
}

ProcessSpec threshold_uniform_preset() {
  ProcessSpec spec;
  spec.interarrival = InterarrivalLaw::uniform(0.0, 5.0);
  spec.cluster = cluster::Threshold{1.0, 0.5, 5.0, 1.0};
  spec.delay_cluster = ClusterModel::empty();
  spec.include_parents = false;
  return spec;
}

ProcessSpec poisson_preset(double rate) {
  ProcessSpec spec;
  spec.interarrival = InterarrivalLaw::exponential(rate);
  spec.include_parents = true;
  return spec;
}

}  // namespace rcs
