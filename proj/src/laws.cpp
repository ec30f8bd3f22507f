#include "rcs/laws.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include <boost/math/special_functions/gamma.hpp>

#include "rcs/core.hpp"
#include "rcs/detail/overloaded.hpp"
#include "rcs/error.hpp"

namespace rcs {

using detail::overloaded;

namespace {

bool positive(double v) { return std::isfinite(v) && v > 0.0; }

}  // namespace

std::uint32_t sample_poisson(double mean, RngStream& rng) {
  if (mean <= 0.0) return 0;
  return std::poisson_distribution<std::uint32_t>(mean)(rng);
}

double sample_normal(RngStream& rng) {
  // Marsaglia polar method; the second variate is discarded so that each call
  // consumes a self-contained block of draws.
  for (;;) {
    const double u = 2.0 * rng.uniform() - 1.0;
    const double v = 2.0 * rng.uniform() - 1.0;
    const double s = u * u + v * v;
    if (s > 0.0 && s < 1.0) return u * std::sqrt(-2.0 * std::log(s) / s);
  }
}

InterarrivalLaw::InterarrivalLaw(Variant v) : v_(std::move(v)) {
  std::visit(
      overloaded{
          [](const law::Exponential& e) {
            if (!positive(e.rate)) throw InvalidArgument("exponential rate must be > 0");
          },
          [](const law::Uniform& u) {
            if (!(std::isfinite(u.lo) && std::isfinite(u.hi) && u.lo >= 0.0 && u.hi > u.lo))
              throw InvalidArgument("uniform law needs 0 <= lo < hi");
          },
          [](const law::Gamma& g) {
            if (!positive(g.shape) || !positive(g.scale))
              throw InvalidArgument("gamma shape and scale must be > 0");
          },
          [this](const law::Mixture& m) {
            if (m.components.empty() || m.weights.size() != m.components.size())
              throw InvalidArgument("mixture needs one weight per component");
            double total = 0.0;
            for (double w : m.weights) {
              if (!(std::isfinite(w) && w >= 0.0))
                throw InvalidArgument("mixture weights must be nonnegative");
              total += w;
            }
            if (!(total > 0.0)) throw InvalidArgument("mixture weights sum to zero");
            double acc = 0.0;
            for (double w : m.weights) cumulative_.push_back(acc += w / total);
            cumulative_.back() = 1.0;
          },
      },
      v_);
}

double InterarrivalLaw::sample(RngStream& rng) const {
  return std::visit(
      overloaded{
          [&](const law::Exponential& e) { return -std::log(rng.uniform_pos()) / e.rate; },
          [&](const law::Uniform& u) { return u.lo + (u.hi - u.lo) * rng.uniform(); },
          [&](const law::Gamma& g) {
            return std::gamma_distribution<double>(g.shape, g.scale)(rng);
          },
          [&](const law::Mixture& m) {
            const double u = rng.uniform();
            std::size_t k = 0;
            while (k + 1 < cumulative_.size() && u >= cumulative_[k]) ++k;
            return m.components[k].sample(rng);
          },
      },
      v_);
}

double InterarrivalLaw::mean() const {
  return std::visit(overloaded{
                        [](const law::Exponential& e) { return 1.0 / e.rate; },
                        [](const law::Uniform& u) { return 0.5 * (u.lo + u.hi); },
                        [](const law::Gamma& g) { return g.shape * g.scale; },
                        [this](const law::Mixture& m) {
                          double s = 0.0, prev = 0.0;
                          for (std::size_t k = 0; k < m.components.size(); ++k) {
                            s += (cumulative_[k] - prev) * m.components[k].mean();
                            prev = cumulative_[k];
                          }
                          return s;
                        },
                    },
                    v_);
}

double InterarrivalLaw::second_moment() const {
  return std::visit(
      overloaded{
          [](const law::Exponential& e) { return 2.0 / (e.rate * e.rate); },
          [](const law::Uniform& u) {
            return (u.hi * u.hi + u.hi * u.lo + u.lo * u.lo) / 3.0;
          },
          [](const law::Gamma& g) { return g.shape * (g.shape + 1.0) * g.scale * g.scale; },
          [this](const law::Mixture& m) {
            double s = 0.0, prev = 0.0;
            for (std::size_t k = 0; k < m.components.size(); ++k) {
              s += (cumulative_[k] - prev) * m.components[k].second_moment();
              prev = cumulative_[k];
            }
            return s;
          },
      },
      v_);
}

double InterarrivalLaw::cdf(double x) const {
  if (x <= 0.0) return 0.0;
  return std::visit(
      overloaded{
          [x](const law::Exponential& e) { return -std::expm1(-e.rate * x); },
          [x](const law::Uniform& u) {
            if (x <= u.lo) return 0.0;
            if (x >= u.hi) return 1.0;
            return (x - u.lo) / (u.hi - u.lo);
          },
          [x](const law::Gamma& g) { return boost::math::gamma_p(g.shape, x / g.scale); },
          [this, x](const law::Mixture& m) {
            double s = 0.0, prev = 0.0;
            for (std::size_t k = 0; k < m.components.size(); ++k) {
              s += (cumulative_[k] - prev) * m.components[k].cdf(x);
              prev = cumulative_[k];
            }
            return s;
          },
      },
      v_);
}

double InterarrivalLaw::partial_mean(double x) const {
  if (x <= 0.0) return 0.0;
  return std::visit(
      overloaded{
          [x](const law::Exponential& e) {
            // integral_0^x y r e^{-ry} dy
            const double rx = e.rate * x;
            return (-std::expm1(-rx) - rx * std::exp(-rx)) / e.rate;
          },
          [x](const law::Uniform& u) {
            const double c = std::min(std::max(x, u.lo), u.hi);
            return (c * c - u.lo * u.lo) / (2.0 * (u.hi - u.lo));
          },
          [x](const law::Gamma& g) {
            return g.shape * g.scale * boost::math::gamma_p(g.shape + 1.0, x / g.scale);
          },
          [this, x](const law::Mixture& m) {
            double s = 0.0, prev = 0.0;
            for (std::size_t k = 0; k < m.components.size(); ++k) {
              s += (cumulative_[k] - prev) * m.components[k].partial_mean(x);
              prev = cumulative_[k];
            }
            return s;
          },
      },
      v_);
}

std::optional<double> InterarrivalLaw::upper_bound() const {
  return std::visit(overloaded{
                        [](const law::Exponential&) -> std::optional<double> { return {}; },
                        [](const law::Uniform& u) -> std::optional<double> { return u.hi; },
                        [](const law::Gamma&) -> std::optional<double> { return {}; },
                        [](const law::Mixture& m) -> std::optional<double> {
                          double b = 0.0;
                          for (std::size_t k = 0; k < m.components.size(); ++k) {
                            if (m.weights[k] == 0.0) continue;
                            const auto c = m.components[k].upper_bound();
                            if (!c) return {};
                            b = std::max(b, *c);
                          }
                          return b;
                        },
                    },
                    v_);
}

std::string InterarrivalLaw::describe() const {
  std::ostringstream os;
  std::visit(overloaded{
                 [&](const law::Exponential& e) {
                   os << "Exponential(rate=" << format_double(e.rate) << ")";
                 },
                 [&](const law::Uniform& u) {
                   os << "Uniform(" << format_double(u.lo) << "," << format_double(u.hi) << ")";
                 },
                 [&](const law::Gamma& g) {
                   os << "Gamma(shape=" << format_double(g.shape)
                      << ",scale=" << format_double(g.scale) << ")";
                 },
                 [&](const law::Mixture& m) {
                   os << "Mixture(";
                   for (std::size_t k = 0; k < m.components.size(); ++k) {
                     if (k) os << ",";
                     os << format_double(m.weights[k]) << "*" << m.components[k].describe();
                   }
                   os << ")";
                 },
             },
             v_);
  return os.str();
}

SizeLaw::SizeLaw(Variant v) : v_(v) {
  if (const auto* p = std::get_if<size_law::Poisson>(&v_)) {
    if (!(std::isfinite(p->mean) && p->mean >= 0.0))
      throw InvalidArgument("poisson mean must be finite and >= 0");
  }
}

std::uint32_t SizeLaw::sample(RngStream& rng) const {
  return std::visit(overloaded{
                        [](const size_law::Constant& c) { return c.value; },
                        [&](const size_law::Poisson& p) { return sample_poisson(p.mean, rng); },
                    },
                    v_);
}

double SizeLaw::mean() const {
  return std::visit(overloaded{
                        [](const size_law::Constant& c) { return double(c.value); },
                        [](const size_law::Poisson& p) { return p.mean; },
                    },
                    v_);
}

double SizeLaw::second_moment() const {
  return std::visit(overloaded{
                        [](const size_law::Constant& c) { return double(c.value) * c.value; },
                        [](const size_law::Poisson& p) { return p.mean + p.mean * p.mean; },
                    },
                    v_);
}

std::string SizeLaw::describe() const {
  return std::visit(overloaded{
                        [](const size_law::Constant& c) {
                          return "Constant(" + std::to_string(c.value) + ")";
                        },
                        [](const size_law::Poisson& p) {
                          return "Poisson(" + format_double(p.mean) + ")";
                        },
                    },
                    v_);
}

OffsetLaw::OffsetLaw(Variant v) : v_(v) {
  std::visit(overloaded{
                 [](const offset_law::Constant& c) {
                   if (!std::isfinite(c.value)) throw InvalidArgument("offset must be finite");
                 },
                 [](const offset_law::Normal& n) {
                   if (!std::isfinite(n.mean) || !positive(n.sd))
                     throw InvalidArgument("normal offset needs finite mean and sd > 0");
                 },
                 [](const offset_law::Uniform& u) {
                   if (!(std::isfinite(u.lo) && std::isfinite(u.hi) && u.hi > u.lo))
                     throw InvalidArgument("uniform offset needs lo < hi");
                 },
             },
             v_);
}

double OffsetLaw::sample(RngStream& rng) const {
  return std::visit(overloaded{
                        [](const offset_law::Constant& c) { return c.value; },
                        [&](const offset_law::Normal& n) {
                          return n.mean + n.sd * sample_normal(rng);
                        },
                        [&](const offset_law::Uniform& u) {
                          return u.lo + (u.hi - u.lo) * rng.uniform();
                        },
                    },
                    v_);
}

std::string OffsetLaw::describe() const {
  return std::visit(overloaded{
                        [](const offset_law::Constant& c) {
                          return "Constant(" + format_double(c.value) + ")";
                        },
                        [](const offset_law::Normal& n) {
                          return "Normal(" + format_double(n.mean) + "," + format_double(n.sd) + ")";
                        },
                        [](const offset_law::Uniform& u) {
                          return "Uniform(" + format_double(u.lo) + "," + format_double(u.hi) + ")";
                        },
                    },
                    v_);
}

}  // namespace rcs
