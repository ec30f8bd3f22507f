#pragma once

#include <concepts>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "rcs/laws.hpp"
#include "rcs/rng.hpp"

namespace rcs {

namespace cluster {

// No points: L = 0.
struct Empty {};

// L from `size`, offsets i.i.d. from `offset`; independent of the interarrival.
struct Iid {
  SizeLaw size;
  OffsetLaw offset;
};

// L from `size`; offset k is the sum of the first k i.i.d. steps.
struct BartlettLewis {
  SizeLaw size;
  InterarrivalLaw step;
};

// Interarrival-dependent clusters: L ~ Poisson(mean_above) when x > threshold
// and Poisson(mean_below) otherwise; each offset is x + Normal(0, offset_sd).
struct Threshold {
  double threshold = 1.0;
  double mean_above = 0.5;
  double mean_below = 5.0;
  double offset_sd = 1.0;
};

}  // namespace cluster

// Joint law of (L, offsets) given the interarrival x that precedes the epoch.
class ClusterModel {
 public:
  using Variant =
      std::variant<cluster::Empty, cluster::Iid, cluster::BartlettLewis, cluster::Threshold>;

  ClusterModel() = default;
  ClusterModel(Variant v);  // NOLINT(google-explicit-constructor)
  template <class T>
    requires std::constructible_from<Variant, T>
  ClusterModel(T alt) : ClusterModel(Variant(std::move(alt))) {}  // NOLINT

  static ClusterModel empty() { return cluster::Empty{}; }

  // Offsets of one cluster; size is the sampled L.
  std::vector<double> sample(double x, RngStream& rng) const;

  // The output law does not depend on x.
  bool x_independent() const noexcept;
  bool is_empty() const noexcept { return std::holds_alternative<cluster::Empty>(v_); }

  // Closed forms under interarrival law `law`; nullopt when not available.
  std::optional<double> mean_size(const InterarrivalLaw& law) const;  // E[L]
  std::optional<double> mean_LX(const InterarrivalLaw& law) const;    // E[L X]
  std::optional<double> mean_LR(const InterarrivalLaw& law) const;    // E[L R]

  const Variant& variant() const noexcept { return v_; }
  std::string describe() const;

 private:
  Variant v_;
};

}  // namespace rcs
