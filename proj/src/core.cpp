#include "rcs/core.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "rcs/error.hpp"

namespace rcs {

namespace {

void check_window(Window w) {
  if (!std::isfinite(w.lo) || !std::isfinite(w.hi) || !(w.lo <= w.hi))
    throw InvalidArgument("window must be a finite interval (lo, hi] with lo <= hi");
}

double parse_double(std::string_view text) {
  double v = 0.0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last)
    throw InvalidArgument("not a number: '" + std::string(text) + "'");
  return v;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.remove_suffix(1);
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  return s;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

PointPattern::PointPattern(Window window) : window_(window) { check_window(window); }

PointPattern::PointPattern(std::vector<double> points, Window window)
    : points_(std::move(points)), window_(window) {
  check_window(window);
  if (!std::is_sorted(points_.begin(), points_.end()))
    std::sort(points_.begin(), points_.end());
  for (double t : points_) {
    if (!std::isfinite(t)) throw InvalidArgument("non-finite time point");
    if (!window_.contains(t))
      throw WindowError("point " + format_double(t) + " outside window (" +
                        format_double(window_.lo) + ", " + format_double(window_.hi) + "]");
  }
}

std::size_t PointPattern::count_in(double a, double b) const {
  if (!(a <= b)) throw InvalidArgument("count_in requires a <= b");
  if (!window_.covers(a, b))
    throw WindowError("interval (" + format_double(a) + ", " + format_double(b) +
                      "] not contained in the simulated window");
  const auto lo = std::upper_bound(points_.begin(), points_.end(), a);
  const auto hi = std::upper_bound(lo, points_.end(), b);
  return static_cast<std::size_t>(hi - lo);
}

std::size_t PointPattern::count_upto(double b) const {
  return static_cast<std::size_t>(
      std::upper_bound(points_.begin(), points_.end(), b) - points_.begin());
}

const double* PointPattern::first_after(double t) const noexcept {
  const auto it = std::upper_bound(points_.begin(), points_.end(), t);
  return it == points_.end() ? nullptr : &*it;
}

PointPattern shift(const PointPattern& p, double t) {
  std::vector<double> pts(p.points());
  for (double& x : pts) x -= t;
  return PointPattern(std::move(pts), p.window().shifted(t));
}

double cluster_radius(const MarkedArrival& arrival) noexcept {
  double r = 0.0;
  for (double o : arrival.offsets) r = std::max(r, std::abs(o));
  return r;
}

MarkedPattern::MarkedPattern(std::vector<MarkedArrival> arrivals, Window window)
    : arrivals_(std::move(arrivals)), window_(window) {
  check_window(window);
  for (std::size_t i = 0; i < arrivals_.size(); ++i) {
    const auto& a = arrivals_[i];
    if (!std::isfinite(a.epoch)) throw InvalidArgument("non-finite epoch");
    if (!(a.interarrival >= 0.0)) throw InvalidArgument("negative interarrival");
    if (i == 0) continue;
    const double gap = a.epoch - arrivals_[i - 1].epoch;
    if (gap < 0.0) throw InvalidArgument("epochs must be nondecreasing");
    const double tol = 1e-9 * std::max(1.0, std::abs(a.epoch));
    if (std::abs(gap - a.interarrival) > tol)
      throw InvalidArgument("epoch difference does not match interarrival at index " +
                            std::to_string(i));
  }
}

FlattenResult flatten(const MarkedPattern& m, bool include_parents) {
  return flatten(m, include_parents, m.window());
}

FlattenResult flatten(const MarkedPattern& m, bool include_parents, Window window) {
  FlattenResult out;
  std::vector<double> pts;
  for (const auto& a : m.arrivals()) {
    if (include_parents) {
      if (window.contains(a.epoch))
        pts.push_back(a.epoch);
      else
        ++out.overflow;
    }
    for (double o : a.offsets) {
      const double t = a.epoch + o;
      if (window.contains(t))
        pts.push_back(t);
      else
        ++out.overflow;
    }
  }
  out.pattern = PointPattern(std::move(pts), window);
  return out;
}

void write_csv(std::ostream& out, const PointPattern& p) {
  out << "t\n";
  for (double t : p.points()) out << format_double(t) << '\n';
}

PointPattern read_point_pattern_csv(std::istream& in, Window window) {
  std::string line;
  if (!std::getline(in, line) || trim(line) != "t")
    throw InvalidArgument("point pattern CSV must start with header 't'");
  std::vector<double> pts;
  while (std::getline(in, line)) {
    const auto field = trim(line);
    if (field.empty()) continue;
    pts.push_back(parse_double(field));
  }
  return PointPattern(std::move(pts), window);
}

void write_csv(std::ostream& out, const MarkedPattern& m) {
  out << "epoch,interarrival,cluster_size,offsets\n";
  for (const auto& a : m.arrivals()) {
    out << format_double(a.epoch) << ',' << format_double(a.interarrival) << ','
        << a.cluster_size() << ',';
    for (std::size_t j = 0; j < a.offsets.size(); ++j) {
      if (j) out << ';';
      out << format_double(a.offsets[j]);
    }
    out << '\n';
  }
}

MarkedPattern read_marked_pattern_csv(std::istream& in, Window window) {
  std::string line;
  if (!std::getline(in, line) || trim(line) != "epoch,interarrival,cluster_size,offsets")
    throw InvalidArgument("marked pattern CSV has an unexpected header");
  std::vector<MarkedArrival> arrivals;
  while (std::getline(in, line)) {
    const auto row = trim(line);
    if (row.empty()) continue;
    std::vector<std::string_view> cols;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= row.size(); ++i) {
      if (i == row.size() || row[i] == ',') {
        cols.push_back(row.substr(start, i - start));
        start = i + 1;
      }
    }
    if (cols.size() != 4) throw InvalidArgument("marked pattern row needs 4 columns");
    MarkedArrival a;
    a.epoch = parse_double(cols[0]);
    a.interarrival = parse_double(cols[1]);
    const auto size = static_cast<std::size_t>(parse_double(cols[2]));
    std::string_view offs = cols[3];
    while (!offs.empty()) {
      const auto semi = offs.find(';');
      a.offsets.push_back(parse_double(offs.substr(0, semi)));
      if (semi == std::string_view::npos) break;
      offs.remove_prefix(semi + 1);
    }
    if (a.offsets.size() != size)
      throw InvalidArgument("cluster_size does not match the number of offsets");
    arrivals.push_back(std::move(a));
  }
  return MarkedPattern(std::move(arrivals), window);
}

}  // namespace rcs
