#include "doctest.h"

#include <cmath>
#include <sstream>

#include "rcs/core.hpp"
#include "rcs/error.hpp"

using namespace rcs;

TEST_CASE("shift") {
  const PointPattern p({1.5, 3.0}, {0.0, 10.0});

  SUBCASE("by zero is the identity") { CHECK(shift(p, 0.0) == p); }

  SUBCASE("translates points and window") {
    const auto q = shift(p, 1.0);
    CHECK(q.points() == std::vector<double>{0.5, 2.0});
    CHECK(q.window() == Window{-1.0, 9.0});
  }

  SUBCASE("composes additively") {
    const PointPattern r({0.25, 4.5, 8.0}, {0.0, 10.0});
    CHECK(shift(shift(r, 0.5), 2.0) == shift(r, 2.5));
  }
}

TEST_CASE("count_in uses half-open intervals") {
  const PointPattern p({1.0, 2.0, 2.0, 5.0}, {0.0, 10.0});
  CHECK(p.count_in(1.0, 2.0) == 2);
  CHECK(p.count_in(0.0, 1.0) == 1);
  CHECK(p.count_in(2.0, 5.0) == 1);
  CHECK(p.count_in(3.0, 3.0) == 0);

  CHECK(PointPattern(Window{0.0, 10.0}).count_in(2.0, 7.0) == 0);

  SUBCASE("additive over abutting intervals") {
    for (double b : {0.0, 1.0, 1.5, 2.0, 4.0, 5.0, 10.0})
      CHECK(p.count_in(0.0, b) + p.count_in(b, 10.0) == p.count_in(0.0, 10.0));
  }

  SUBCASE("covariant under shift") {
    const auto q = shift(p, 3.25);
    CHECK(q.count_in(1.0 - 3.25, 5.0 - 3.25) == p.count_in(1.0, 5.0));
  }

  SUBCASE("outside the window throws") {
    CHECK_THROWS_AS(p.count_in(-1.0, 2.0), WindowError);
    CHECK_THROWS_AS(p.count_in(5.0, 11.0), WindowError);
  }
}

TEST_CASE("pattern construction validates") {
  const PointPattern p({3.0, 1.0, 2.0}, {0.0, 3.0});
  CHECK(p.points() == std::vector<double>{1.0, 2.0, 3.0});
  CHECK_THROWS_AS(PointPattern({0.0}, {0.0, 1.0}), WindowError);
  CHECK_THROWS_AS(PointPattern({std::nan("")}, {0.0, 1.0}), InvalidArgument);
  CHECK(*p.first_after(1.0) == 2.0);
  CHECK(p.first_after(3.0) == nullptr);
}

TEST_CASE("marked pattern checks epoch gaps") {
  std::vector<MarkedArrival> ok{{1.0, {}, 1.0}, {3.5, {0.1}, 2.5}};
  CHECK_NOTHROW(MarkedPattern(ok, {0.0, 10.0}));
  std::vector<MarkedArrival> bad{{1.0, {}, 1.0}, {3.5, {}, 2.0}};
  CHECK_THROWS_AS(MarkedPattern(bad, {0.0, 10.0}), InvalidArgument);
  std::vector<MarkedArrival> unsorted{{3.0, {}, 3.0}, {1.0, {}, -2.0}};
  CHECK_THROWS(MarkedPattern(unsorted, {0.0, 10.0}));
}

TEST_CASE("flatten") {
  SUBCASE("empty clusters without parents give nothing") {
    const MarkedPattern m({{1.0, {}, 1.0}, {2.0, {}, 1.0}}, {0.0, 10.0});
    CHECK(flatten(m, false).pattern.empty());
    CHECK(flatten(m, true).pattern.size() == 2);
  }

  SUBCASE("single arrival with parents") {
    const MarkedPattern m({{2.0, {-0.5, 1.0}, 2.0}}, {0.0, 10.0});
    const auto f = flatten(m, true);
    CHECK(f.pattern.points() == std::vector<double>{1.5, 2.0, 3.0});
    CHECK(f.overflow == 0);
  }

  SUBCASE("overflow is tallied") {
    const MarkedPattern m({{1.0, {-2.0, 0.5}, 1.0}, {9.5, {1.0}, 8.5}}, {0.0, 10.0});
    const auto f = flatten(m, true);
    // 5 generated points, two fall outside (0, 10].
    CHECK(f.pattern.points() == std::vector<double>{1.0, 1.5, 9.5});
    CHECK(f.overflow == 2);
    CHECK(f.pattern.size() + f.overflow == 3 + 2);

    const auto g = flatten(m, false, {0.0, 5.0});
    CHECK(g.pattern.points() == std::vector<double>{1.5});
    CHECK(g.overflow == 2);
  }
}

TEST_CASE("cluster radius") {
  CHECK(cluster_radius({0.0, {}, 0.0}) == 0.0);
  CHECK(cluster_radius({0.0, {-0.5, 1.0, 0.2}, 0.0}) == 1.0);
  CHECK(cluster_radius({0.0, {-3.0, 1.0}, 0.0}) == 3.0);
  CHECK(cluster_radius({0.0, {0.7, 0.7, 0.7}, 0.0}) == 0.7);
}

TEST_CASE("csv round trip") {
  const PointPattern p({0.1, 1.0 / 3.0, 2.0, 1e-300, 7.123456789012345}, {0.0, 10.0});
  std::stringstream ss;
  write_csv(ss, p);
  CHECK(ss.str().rfind("t\n", 0) == 0);
  CHECK(read_point_pattern_csv(ss, p.window()) == p);

  const MarkedPattern m({{0.5, {}, 0.5}, {1.0 / 3.0 + 0.5, {-0.25, 1.0 / 7.0}, 1.0 / 3.0}},
                        {0.0, 5.0});
  std::stringstream ms;
  write_csv(ms, m);
  CHECK(ms.str().rfind("epoch,interarrival,cluster_size,offsets\n", 0) == 0);
  CHECK(read_marked_pattern_csv(ms, m.window()) == m);

  CHECK(format_double(0.1) == "0.1");
}
