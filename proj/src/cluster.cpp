#include "rcs/cluster.hpp"

#include <cmath>

#include "rcs/core.hpp"
#include "rcs/detail/overloaded.hpp"
#include "rcs/error.hpp"

namespace rcs {

using detail::overloaded;

ClusterModel::ClusterModel(Variant v) : v_(std::move(v)) {
  if (const auto* t = std::get_if<cluster::Threshold>(&v_)) {
    const bool ok = std::isfinite(t->threshold) && std::isfinite(t->mean_above) &&
                    std::isfinite(t->mean_below) && t->mean_above >= 0.0 &&
                    t->mean_below >= 0.0 && std::isfinite(t->offset_sd) &&
                    t->offset_sd >= 0.0;
    if (!ok) throw InvalidArgument("threshold cluster parameters out of range");
  }
}

std::vector<double> ClusterModel::sample(double x, RngStream& rng) const {
  return std::visit(
      overloaded{
          [](const cluster::Empty&) { return std::vector<double>{}; },
          [&](const cluster::Iid& m) {
            std::vector<double> out(m.size.sample(rng));
            for (double& o : out) o = m.offset.sample(rng);
            return out;
          },
          [&](const cluster::BartlettLewis& m) {
            std::vector<double> out(m.size.sample(rng));
            double acc = 0.0;
            for (double& o : out) o = (acc += m.step.sample(rng));
            return out;
          },
          [&](const cluster::Threshold& m) {
            const double mean = x > m.threshold ? m.mean_above : m.mean_below;
            std::vector<double> out(sample_poisson(mean, rng));
            for (double& o : out) o = x + m.offset_sd * sample_normal(rng);
            return out;
          },
      },
      v_);
}

bool ClusterModel::x_independent() const noexcept {
  return !std::holds_alternative<cluster::Threshold>(v_);
}

std::optional<double> ClusterModel::mean_size(const InterarrivalLaw& law) const {
  return std::visit(overloaded{
                        [](const cluster::Empty&) -> std::optional<double> { return 0.0; },
                        [](const cluster::Iid& m) -> std::optional<double> {
                          return m.size.mean();
                        },
                        [](const cluster::BartlettLewis& m) -> std::optional<double> {
                          return m.size.mean();
                        },
                        [&](const cluster::Threshold& m) -> std::optional<double> {
                          const double below = law.cdf(m.threshold);
                          return m.mean_above * (1.0 - below) + m.mean_below * below;
                        },
                    },
                    v_);
}

std::optional<double> ClusterModel::mean_LX(const InterarrivalLaw& law) const {
  return std::visit(overloaded{
                        [](const cluster::Empty&) -> std::optional<double> { return 0.0; },
                        [&](const cluster::Iid& m) -> std::optional<double> {
                          return m.size.mean() * law.mean();
                        },
                        [&](const cluster::BartlettLewis& m) -> std::optional<double> {
                          return m.size.mean() * law.mean();
                        },
                        [&](const cluster::Threshold& m) -> std::optional<double> {
                          const double below = law.partial_mean(m.threshold);
                          return m.mean_above * (law.mean() - below) + m.mean_below * below;
                        },
                    },
                    v_);
}

std::optional<double> ClusterModel::mean_LR(const InterarrivalLaw&) const {
  return std::visit(
      overloaded{
          [](const cluster::Empty&) -> std::optional<double> { return 0.0; },
          [](const cluster::Iid& m) -> std::optional<double> {
            // R = |c| whenever the cluster is nonempty.
            if (const auto* c = std::get_if<offset_law::Constant>(&m.offset.variant()))
              return m.size.mean() * std::abs(c->value);
            return std::nullopt;
          },
          [](const cluster::BartlettLewis& m) -> std::optional<double> {
            // R is the last partial sum, so E[L R] = E[L^2] E[Y].
            return m.size.second_moment() * m.step.mean();
          },
          [](const cluster::Threshold&) -> std::optional<double> { return std::nullopt; },
      },
      v_);
}

std::string ClusterModel::describe() const {
  return std::visit(overloaded{
                        [](const cluster::Empty&) { return std::string("Empty"); },
                        [](const cluster::Iid& m) {
                          return "Iid(size=" + m.size.describe() +
                                 ",offset=" + m.offset.describe() + ")";
                        },
                        [](const cluster::BartlettLewis& m) {
                          return "BartlettLewis(size=" + m.size.describe() +
                                 ",step=" + m.step.describe() + ")";
                        },
                        [](const cluster::Threshold& m) {
                          return "Threshold(threshold=" + format_double(m.threshold) +
                                 ",above=" + format_double(m.mean_above) +
                                 ",below=" + format_double(m.mean_below) +
                                 ",sd=" + format_double(m.offset_sd) + ")";
                        },
                    },
                    v_);
}

}  // namespace rcs
