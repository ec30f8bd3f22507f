#include "rcs/stationary.hpp"

#include <algorithm>
#include <cmath>

#include "rcs/error.hpp"

namespace rcs {

SizeBiasedMark sample_size_biased_mark(const ProcessSpec& spec, RngStream& rng,
                                       const SizeBiasOptions& opts) {
  const auto& law = spec.interarrival;
  SizeBiasedMark out;
  double x = 0.0;
  if (const auto bound = law.upper_bound()) {
    x = size_biased_rejection([&] { return law.sample(rng); }, [](double v) { return v; },
                              *bound, rng);
  } else {
    if (opts.pool_size == 0)
      throw InvalidArgument("size biasing an unbounded interarrival law needs a candidate pool");
    std::vector<double> pool(opts.pool_size);
    double total = 0.0;
    for (double& v : pool) total += (v = law.sample(rng));
    const double u = rng.uniform() * total;
    double acc = 0.0;
    std::size_t pick = pool.size() - 1;
    for (std::size_t i = 0; i < pool.size(); ++i) {
      acc += pool[i];
      if (u < acc) {
        pick = i;
        break;
      }
    }
    x = pool[pick];
    out.approximate = true;
  }
  // Clusters depend on the mark only through x, so drawing x first and the
  // cluster given x is a draw of the biased joint law.
  out.mark.interarrival = x;
  out.mark.offsets = spec.cluster.sample(x, rng);
  return out;
}

TwoSidedMarkedPattern sample_stationary_marked_renewal(const ProcessSpec& spec, double window_lo,
                                                       double window_hi, double guard,
                                                       RngStream& rng,
                                                       const SizeBiasOptions& opts,
                                                       const SamplingOptions& sampling) {
  if (!(window_lo < window_hi)) throw InvalidArgument("window needs lo < hi");
  if (!(guard >= 0.0)) throw InvalidArgument("guard must be nonnegative");
  const double left_stop = window_lo - guard;
  const double right_stop = window_hi + guard;

  auto biased = sample_size_biased_mark(spec, rng, opts);
  const double x_star = biased.mark.interarrival;
  const double u = rng.uniform();

  std::vector<MarkedArrival> right;
  MarkedArrival origin = std::move(biased.mark);
  origin.epoch = u * x_star;
  right.push_back(std::move(origin));
  double epoch = right.front().epoch;
  for (;;) {
    const double x = spec.interarrival.sample(rng);
    epoch += x;
    if (epoch > right_stop) break;
    if (right.size() >= sampling.runaway_cap) throw RunawayError("runaway right extension");
    right.push_back({epoch, spec.cluster.sample(x, rng), x});
  }

  // Left side: T_-1 carries an ordinary mark whose interarrival is the gap
  // back to T_-2.
  std::vector<MarkedArrival> left;
  epoch = -(1.0 - u) * x_star;
  for (;;) {
    const double x = spec.interarrival.sample(rng);
    left.push_back({epoch, spec.cluster.sample(x, rng), x});
    epoch -= x;
    if (epoch < left_stop) break;
    if (left.size() >= sampling.runaway_cap) throw RunawayError("runaway left extension");
  }

  TwoSidedMarkedPattern out;
  out.origin_index = left.size();
  out.approximate = biased.approximate;
  std::vector<MarkedArrival> all;
  all.reserve(left.size() + right.size());
  std::move(left.rbegin(), left.rend(), std::back_inserter(all));
  std::move(right.begin(), right.end(), std::back_inserter(all));
  const double lo = std::min(left_stop, all.front().epoch);
  const double hi = std::max(right_stop, all.back().epoch);
  out.pattern = MarkedPattern(std::move(all), Window{std::nextafter(lo, -INFINITY), hi});
  return out;
}

ClusterSample sample_stationary_cluster_process(const ProcessSpec& spec, double window_lo,
                                                double window_hi, const GuardBand& guard,
                                                RngStream& rng, const SizeBiasOptions& opts,
                                                const SamplingOptions& sampling) {
  const auto two_sided =
      sample_stationary_marked_renewal(spec, window_lo, window_hi, guard.width, rng, opts, sampling);
  auto flat = flatten(two_sided.pattern, spec.include_parents, Window{window_lo, window_hi});
  ClusterSample out;
  out.pattern = std::move(flat.pattern);
  out.overflow = flat.overflow;
  out.parents = two_sided.pattern.size();
  for (const auto& a : two_sided.pattern.arrivals())
    if (cluster_radius(a) > guard.width) ++out.truncation_tally;
  return out;
}

PointStationarityReport point_stationary_check(const ProcessSpec& spec, std::size_t k,
                                               std::size_t n_rep, const RngStream& rng,
                                               std::size_t m, double alpha) {
  if (m == 0 || n_rep == 0) throw InvalidArgument("point_stationary_check needs m, n_rep >= 1");
  const std::size_t coords = 2 * m;
  std::vector<std::vector<double>> at_origin(coords), recentered(coords);
  for (auto& v : at_origin) v.reserve(n_rep);
  for (auto& v : recentered) v.reserve(n_rep);

  for (std::size_t r = 0; r < n_rep; ++r) {
    RngStream s = rng.split(r);
    // Zero-anchored process: epoch 0 and i.i.d. marks at every index.
    std::vector<double> epochs{0.0};
    std::vector<double> sizes;
    const double x0 = spec.interarrival.sample(s);
    sizes.push_back(double(spec.cluster.sample(x0, s).size()));
    for (std::size_t i = 1; i <= k + m; ++i) {
      const double x = spec.interarrival.sample(s);
      epochs.push_back(epochs.back() + x);
      sizes.push_back(double(spec.cluster.sample(x, s).size()));
    }
    // Recentring at T_k shifts every epoch by -T_k; gaps are read off the
    // shifted epochs.
    const double anchor = epochs[k];
    for (std::size_t j = 1; j <= m; ++j) {
      at_origin[j - 1].push_back(epochs[j] - epochs[j - 1]);
      at_origin[m + j - 1].push_back(sizes[j]);
      recentered[j - 1].push_back((epochs[k + j] - anchor) - (epochs[k + j - 1] - anchor));
      recentered[m + j - 1].push_back(sizes[k + j]);
    }
  }

  PointStationarityReport rep;
  rep.k = k;
  rep.coordinates = coords;
  for (std::size_t c = 0; c < coords; ++c) {
    auto ks = two_sample_ks(at_origin[c], recentered[c], alpha);
    rep.max_distance = std::max(rep.max_distance, ks.distance);
    rep.max_critical_value = std::max(rep.max_critical_value, ks.critical_value);
    rep.reject = rep.reject || ks.reject;
    rep.per_coordinate.push_back(ks);
  }
  return rep;
}

}  // namespace rcs
