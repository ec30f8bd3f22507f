#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace rcs {

// Half-open interval (lo, hi].
struct Window {
  double lo = 0.0;
  double hi = 0.0;

  bool contains(double t) const noexcept { return lo < t && t <= hi; }
  // (a, b] is a subset of this window.
  bool covers(double a, double b) const noexcept { return lo <= a && b <= hi; }
  double length() const noexcept { return hi - lo; }
  Window shifted(double t) const noexcept { return {lo - t, hi - t}; }

  friend bool operator==(const Window&, const Window&) = default;
};

// Finite sorted multiset of time points inside a window.
class PointPattern {
 public:
  PointPattern() = default;
  explicit PointPattern(Window window);
  // Sorts `points`; throws InvalidArgument for non-finite values and
  // WindowError for points outside `window`.
  PointPattern(std::vector<double> points, Window window);

  const std::vector<double>& points() const noexcept { return points_; }
  const Window& window() const noexcept { return window_; }
  std::size_t size() const noexcept { return points_.size(); }
  bool empty() const noexcept { return points_.empty(); }

  // Number of points x with a < x <= b. Throws WindowError unless
  // (a, b] lies inside the window.
  std::size_t count_in(double a, double b) const;
  // Number of points x <= b, with no window check on the left.
  std::size_t count_upto(double b) const;
  // First point strictly greater than t, or nullptr.
  const double* first_after(double t) const noexcept;

  friend bool operator==(const PointPattern&, const PointPattern&) = default;

 private:
  std::vector<double> points_;
  Window window_;
};

// Translate every point and the window by -t.
PointPattern shift(const PointPattern& p, double t);

// One epoch with its mark: cluster offsets and the interarrival that
// preceded it.
struct MarkedArrival {
  double epoch = 0.0;
  std::vector<double> offsets;  // cluster_size == offsets.size()
  double interarrival = 0.0;

  std::size_t cluster_size() const noexcept { return offsets.size(); }

  friend bool operator==(const MarkedArrival&, const MarkedArrival&) = default;
};

// Largest |offset| in the cluster; 0 when empty.
double cluster_radius(const MarkedArrival& arrival) noexcept;

// Arrivals sorted by epoch. Consecutive epoch differences match the later
// arrival's interarrival to 1e-9 relative tolerance.
class MarkedPattern {
 public:
  MarkedPattern() = default;
  // Validates ordering and the interarrival invariant.
  MarkedPattern(std::vector<MarkedArrival> arrivals, Window window);

  const std::vector<MarkedArrival>& arrivals() const noexcept { return arrivals_; }
  const Window& window() const noexcept { return window_; }
  std::size_t size() const noexcept { return arrivals_.size(); }

  friend bool operator==(const MarkedPattern&, const MarkedPattern&) = default;

 private:
  std::vector<MarkedArrival> arrivals_;
  Window window_;
};

struct FlattenResult {
  PointPattern pattern;
  std::size_t overflow = 0;  // points dropped for falling outside the window
};

// Superpose epoch + offset for every arrival (plus the epochs themselves when
// include_parents is set), restricted to the marked pattern's window.
FlattenResult flatten(const MarkedPattern& m, bool include_parents);

// Same, restricted to `window` instead of m.window().
FlattenResult flatten(const MarkedPattern& m, bool include_parents, Window window);

// CSV: header `t`, one time per line.
void write_csv(std::ostream& out, const PointPattern& p);
PointPattern read_point_pattern_csv(std::istream& in, Window window);

// CSV: `epoch,interarrival,cluster_size,offsets`, offsets joined by ';'.
void write_csv(std::ostream& out, const MarkedPattern& m);
MarkedPattern read_marked_pattern_csv(std::istream& in, Window window);

// Shortest decimal text that reads back to exactly `v`.
std::string format_double(double v);

}  // namespace rcs
