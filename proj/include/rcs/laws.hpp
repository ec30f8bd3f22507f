#pragma once

#include <concepts>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "rcs/rng.hpp"

namespace rcs {

class InterarrivalLaw;

namespace law {

struct Exponential {
  double rate = 1.0;
};

struct Uniform {
  double lo = 0.0;
  double hi = 1.0;
};

struct Gamma {
  double shape = 1.0;
  double scale = 1.0;
};

struct Mixture {
  std::vector<double> weights;
  std::vector<InterarrivalLaw> components;
};

}  // namespace law

// Continuous law on [0, inf) with finite positive mean. Every variant is
// absolutely continuous, so every law built from them is nonarithmetic.
class InterarrivalLaw {
 public:
  using Variant = std::variant<law::Exponential, law::Uniform, law::Gamma, law::Mixture>;

  InterarrivalLaw() : v_(law::Exponential{1.0}) {}
  // Validates parameters; throws InvalidArgument.
  InterarrivalLaw(Variant v);  // NOLINT(google-explicit-constructor)
  template <class T>
    requires std::constructible_from<Variant, T>
  InterarrivalLaw(T alt) : InterarrivalLaw(Variant(std::move(alt))) {}  // NOLINT

  static InterarrivalLaw exponential(double rate) { return law::Exponential{rate}; }
  static InterarrivalLaw uniform(double lo, double hi) { return law::Uniform{lo, hi}; }
  static InterarrivalLaw gamma(double shape, double scale) { return law::Gamma{shape, scale}; }
  static InterarrivalLaw mixture(std::vector<double> weights,
                                 std::vector<InterarrivalLaw> components) {
    return law::Mixture{std::move(weights), std::move(components)};
  }

  double sample(RngStream& rng) const;

  double mean() const;
  double second_moment() const;
  double cdf(double x) const;
  double survival(double x) const { return 1.0 - cdf(x); }
  // E[X 1{X <= x}]
  double partial_mean(double x) const;
  // Essential supremum, when finite.
  std::optional<double> upper_bound() const;

  const Variant& variant() const noexcept { return v_; }
  std::string describe() const;

 private:
  Variant v_;
  std::vector<double> cumulative_;  // mixture only
};

namespace size_law {

struct Constant {
  std::uint32_t value = 0;
};

struct Poisson {
  double mean = 1.0;
};

}  // namespace size_law

// Law of a cluster size: a nonnegative, almost surely finite integer.
class SizeLaw {
 public:
  using Variant = std::variant<size_law::Constant, size_law::Poisson>;

  SizeLaw(Variant v);  // NOLINT(google-explicit-constructor)
  template <class T>
    requires std::constructible_from<Variant, T>
  SizeLaw(T alt) : SizeLaw(Variant(alt)) {}  // NOLINT

  static SizeLaw constant(std::uint32_t n) { return size_law::Constant{n}; }
  static SizeLaw poisson(double mean) { return size_law::Poisson{mean}; }

  std::uint32_t sample(RngStream& rng) const;
  double mean() const;
  double second_moment() const;
  const Variant& variant() const noexcept { return v_; }
  std::string describe() const;

 private:
  Variant v_;
};

std::uint32_t sample_poisson(double mean, RngStream& rng);
double sample_normal(RngStream& rng);

namespace offset_law {

struct Constant {
  double value = 0.0;
};

struct Normal {
  double mean = 0.0;
  double sd = 1.0;
};

struct Uniform {
  double lo = 0.0;
  double hi = 1.0;
};

}  // namespace offset_law

// Law of a single real-valued cluster offset (may be negative).
class OffsetLaw {
 public:
  using Variant = std::variant<offset_law::Constant, offset_law::Normal, offset_law::Uniform>;

  OffsetLaw(Variant v);  // NOLINT(google-explicit-constructor)
  template <class T>
    requires std::constructible_from<Variant, T>
  OffsetLaw(T alt) : OffsetLaw(Variant(alt)) {}  // NOLINT

  static OffsetLaw constant(double c) { return offset_law::Constant{c}; }
  static OffsetLaw normal(double mean, double sd) { return offset_law::Normal{mean, sd}; }
  static OffsetLaw uniform(double lo, double hi) { return offset_law::Uniform{lo, hi}; }

  double sample(RngStream& rng) const;
  const Variant& variant() const noexcept { return v_; }
  std::string describe() const;

 private:
  Variant v_;
};

}  // namespace rcs
