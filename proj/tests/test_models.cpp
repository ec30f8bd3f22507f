#include "doctest.h"

#include <cmath>
#include <vector>

#include "rcs/cluster.hpp"
#include "rcs/error.hpp"
#include "rcs/laws.hpp"
#include "rcs/process.hpp"
#include "rcs/stats.hpp"

using namespace rcs;

namespace {

// |mean - target| within k standard errors.
void check_mean(const RunningStats& s, double target, double k) {
  INFO("mean=" << s.mean() << " se=" << s.std_error() << " target=" << target);
  CHECK(std::abs(s.mean() - target) <= k * s.std_error());
}

RunningStats interarrival_stats(const InterarrivalLaw& law, std::size_t n, RngStream rng) {
  RunningStats s;
  for (std::size_t i = 0; i < n; ++i) s.add(sample_interarrival(law, rng));
  return s;
}

}  // namespace

TEST_CASE("interarrival means") {
  check_mean(interarrival_stats(InterarrivalLaw::uniform(0, 5), 1'000'000, RngStream(10, 0)), 2.5, 3);
  check_mean(interarrival_stats(InterarrivalLaw::exponential(1), 1'000'000, RngStream(10, 1)), 1.0, 3);
  const auto gamma = InterarrivalLaw::gamma(2.0, 0.5);
  CHECK(gamma.mean() == doctest::Approx(1.0));
  check_mean(interarrival_stats(gamma, 1'000'000, RngStream(10, 2)), 1.0, 3);
}

TEST_CASE("interarrival accessors agree with simulation") {
  const std::vector<InterarrivalLaw> laws{
      InterarrivalLaw::uniform(0, 5), InterarrivalLaw::exponential(2.0),
      InterarrivalLaw::gamma(3.0, 0.25),
      InterarrivalLaw::mixture({0.3, 0.7},
                               {InterarrivalLaw::exponential(1.0), InterarrivalLaw::uniform(1, 2)})};
  std::uint64_t id = 0;
  for (const auto& law : laws) {
    CAPTURE(law.describe());
    RngStream rng(11, id++);
    RunningStats m1, m2, part;
    std::vector<double> xs;
    for (int i = 0; i < 100000; ++i) {
      const double x = law.sample(rng);
      REQUIRE(x >= 0.0);
      m1.add(x);
      m2.add(x * x);
      part.add(x <= 1.0 ? x : 0.0);
      xs.push_back(x);
    }
    check_mean(m1, law.mean(), 4);
    check_mean(m2, law.second_moment(), 4);
    check_mean(part, law.partial_mean(1.0), 4);
    CHECK_FALSE(one_sample_ks(xs, [&](double x) { return law.cdf(x); }, 0.001).reject);
  }
  CHECK(*InterarrivalLaw::uniform(0, 5).upper_bound() == 5.0);
  CHECK_FALSE(InterarrivalLaw::exponential(1).upper_bound());
}

TEST_CASE("invalid laws are rejected") {
  CHECK_THROWS_AS(InterarrivalLaw::exponential(0.0), InvalidArgument);
  CHECK_THROWS_AS(InterarrivalLaw::uniform(3.0, 2.0), InvalidArgument);
  CHECK_THROWS_AS(InterarrivalLaw::gamma(-1.0, 1.0), InvalidArgument);
  CHECK_THROWS_AS(SizeLaw::poisson(-1.0), InvalidArgument);
}

TEST_CASE("threshold preset clusters") {
  const auto spec = threshold_uniform_preset();
  RngStream rng(12, 0);

  SUBCASE("long interarrival: Poisson(0.5) sizes around x") {
    RunningStats size, offset;
    for (int i = 0; i < 100000; ++i) {
      const auto c = sample_cluster(spec.cluster, 2.0, rng);
      size.add(double(c.size()));
      for (double o : c) offset.add(o);
    }
    check_mean(size, 0.5, 3);
    check_mean(offset, 2.0, 4);
    CHECK(offset.sd() == doctest::Approx(1.0).epsilon(0.02));
  }

  SUBCASE("short interarrival: Poisson(5) sizes") {
    RunningStats size;
    for (int i = 0; i < 100000; ++i) size.add(double(sample_cluster(spec.cluster, 0.5, rng).size()));
    check_mean(size, 5.0, 3);
  }

  SUBCASE("closed-form accessors") {
    CHECK(spec.mean_interarrival() == doctest::Approx(2.5));
    CHECK(*spec.cluster.mean_size(spec.interarrival) == doctest::Approx(1.4));
    CHECK(*spec.cluster.mean_size(spec.interarrival) / spec.mean_interarrival() ==
          doctest::Approx(0.56));
    CHECK_FALSE(spec.cluster.x_independent());
    CHECK(spec.delay_cluster.is_empty());
    CHECK_FALSE(spec.include_parents);
  }

  SUBCASE("E[L] and E[LX] by simulation") {
    RunningStats l, lx;
    for (int i = 0; i < 200000; ++i) {
      const double x = sample_interarrival(spec.interarrival, rng);
      const double n = double(sample_cluster(spec.cluster, x, rng).size());
      l.add(n);
      lx.add(n * x);
    }
    check_mean(l, *spec.cluster.mean_size(spec.interarrival), 4);
    check_mean(lx, *spec.cluster.mean_LX(spec.interarrival), 4);
  }
}

TEST_CASE("bartlett-lewis accessors") {
  const auto spec = bartlett_lewis_preset(1.0, SizeLaw::poisson(1.0), InterarrivalLaw::exponential(1.0));
  CHECK(*spec.cluster.mean_size(spec.interarrival) + 1.0 == doctest::Approx(2.0));
  CHECK(spec.cluster.x_independent());

  RngStream rng(13, 0);
  RunningStats l, lx, lr;
  for (int i = 0; i < 200000; ++i) {
    const double x = sample_interarrival(spec.interarrival, rng);
    const auto c = sample_cluster(spec.cluster, x, rng);
    for (std::size_t j = 1; j < c.size(); ++j) REQUIRE(c[j] >= c[j - 1]);
    const MarkedArrival a{0.0, c, x};
    l.add(double(c.size()));
    lx.add(double(c.size()) * x);
    lr.add(double(c.size()) * cluster_radius(a));
  }
  check_mean(l, *spec.cluster.mean_size(spec.interarrival), 4);
  check_mean(lx, *spec.cluster.mean_LX(spec.interarrival), 4);
  check_mean(lr, *spec.cluster.mean_LR(spec.interarrival), 4);
}

TEST_CASE("x-independent cluster sizes do not depend on x") {
  const ClusterModel model = cluster::Iid{SizeLaw::poisson(3.0), OffsetLaw::normal(0.0, 2.0)};
  RngStream rng(14, 0);
  std::vector<double> at_small, at_large;
  for (int i = 0; i < 20000; ++i) {
    at_small.push_back(double(model.sample(0.1, rng).size()));
    at_large.push_back(double(model.sample(40.0, rng).size()));
  }
  CHECK_FALSE(two_sample_ks(at_small, at_large, 0.01).reject);
}

TEST_CASE("empty cluster model") {
  RngStream rng(15, 0);
  const auto m = ClusterModel::empty();
  for (double x : {0.0, 1.0, 100.0}) CHECK(m.sample(x, rng).empty());
  CHECK(*m.mean_size(InterarrivalLaw::uniform(0, 5)) == 0.0);
}

TEST_CASE("delayed marked renewal") {
  SUBCASE("Poisson arrival counts") {
    ProcessSpec spec = poisson_preset(1.0);
    RunningStats n;
    for (std::uint64_t r = 0; r < 2000; ++r) {
      RngStream rng(16, r);
      const auto m = sample_delayed_marked_renewal(spec, 50.0, 0.0, rng);
      double c = 0;
      for (const auto& a : m.arrivals()) c += (a.epoch > 0.0 && a.epoch <= 50.0);
      n.add(c);
    }
    check_mean(n, 50.0, 4);
  }

  SUBCASE("uniform(0,5) renewal rate") {
    ProcessSpec spec = threshold_uniform_preset();
    RunningStats rate;
    for (std::uint64_t r = 0; r < 20; ++r) {
      RngStream rng(17, r);
      const auto m = sample_delayed_marked_renewal(spec, 1e4, 0.0, rng);
      double c = 0;
      for (const auto& a : m.arrivals()) c += (a.epoch > 0.0 && a.epoch <= 1e4);
      rate.add(c / 1e4);
    }
    CHECK(rate.mean() == doctest::Approx(0.4).epsilon(0.01));
  }

  SUBCASE("zero horizon with positive delay is empty") {
    ProcessSpec spec = threshold_uniform_preset();
    spec.delay = InterarrivalLaw::uniform(1.0, 2.0);
    RngStream rng(18, 0);
    CHECK(sample_delayed_marked_renewal(spec, 0.0, 0.0, rng).size() == 0);
  }

  SUBCASE("runaway cap") {
    ProcessSpec spec = poisson_preset(1.0);
    RngStream rng(19, 0);
    CHECK_THROWS_AS(sample_delayed_marked_renewal(spec, 1e4, 0.0, rng, {100}), RunawayError);
  }

  SUBCASE("reproducible") {
    const auto spec = threshold_uniform_preset();
    RngStream a(20, 3), b(20, 3);
    CHECK(sample_delayed_marked_renewal(spec, 300.0, 10.0, a) ==
          sample_delayed_marked_renewal(spec, 300.0, 10.0, b));
  }
}

TEST_CASE("renewal cluster process") {
  SUBCASE("empty clusters with parents reproduce the parent process") {
    const auto spec = poisson_preset(1.0);
    const GuardBand guard{};
    RngStream a(21, 0), b(21, 0);
    const auto cp = sample_renewal_cluster_process(spec, 0.0, 100.0, guard, a);
    const auto m = sample_delayed_marked_renewal(spec, 100.0, 0.0, b);
    std::vector<double> epochs;
    for (const auto& x : m.arrivals())
      if (x.epoch > 0.0 && x.epoch <= 100.0) epochs.push_back(x.epoch);
    CHECK(cp.pattern.points() == epochs);
  }

  SUBCASE("bartlett-lewis window mean") {
    const auto spec = bartlett_lewis_preset(1.0, SizeLaw::poisson(1.0), InterarrivalLaw::exponential(1.0));
    const auto guard = guard_band(spec, 22);
    RunningStats n;
    for (std::uint64_t r = 0; r < 20000; ++r) {
      RngStream rng(22, r);
      n.add(double(sample_renewal_cluster_process(spec, 200.0, 201.0, guard, rng)
                       .pattern.count_in(200.0, 201.0)));
    }
    check_mean(n, 2.0, 4);
  }

  SUBCASE("negative window is empty without negative offsets") {
    const auto spec = bartlett_lewis_preset(1.0, SizeLaw::poisson(1.0), InterarrivalLaw::exponential(1.0));
    RngStream rng(23, 0);
    CHECK(sample_renewal_cluster_process(spec, -10.0, -1.0, rng).pattern.empty());
  }

  SUBCASE("empty bartlett-lewis clusters degenerate to Poisson") {
    const auto spec = bartlett_lewis_preset(2.0, SizeLaw::constant(0), InterarrivalLaw::exponential(1.0));
    CHECK(*spec.cluster.mean_size(spec.interarrival) == 0.0);
    RunningStats n;
    for (std::uint64_t r = 0; r < 5000; ++r) {
      RngStream rng(24, r);
      n.add(double(sample_renewal_cluster_process(spec, 10.0, 15.0, rng).pattern.size()));
    }
    check_mean(n, 10.0, 4);
  }
}

TEST_CASE("guard band") {
  const auto spec = bartlett_lewis_preset(1.0, SizeLaw::poisson(1.0), InterarrivalLaw::exponential(1.0));
  const auto g = guard_band(spec, 25);
  CHECK(g.width == doctest::Approx(1.25 * g.radius_quantile));
  CHECK(g.radius_quantile > 5.0);
  CHECK(g.bias_estimate >= 0.0);
  CHECK(guard_band(spec, 25).width == g.width);
  CHECK(guard_band(poisson_preset(1.0), 25).width == 0.0);
}
