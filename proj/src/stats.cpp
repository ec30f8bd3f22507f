#include "rcs/stats.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/distributions/normal.hpp>

#include "rcs/error.hpp"

namespace rcs {

void RunningStats::add(double x) noexcept {
  ++n_;
  const double d = x - mean_;
  mean_ += d / double(n_);
  m2_ += d * (x - mean_);
}

double RunningStats::variance() const noexcept {
  return n_ < 2 ? 0.0 : m2_ / double(n_ - 1);
}

double RunningStats::sd() const noexcept { return std::sqrt(variance()); }

double RunningStats::std_error() const noexcept {
  return n_ == 0 ? 0.0 : sd() / std::sqrt(double(n_));
}

double normal_z(double level) {
  if (!(level > 0.0 && level < 1.0)) throw InvalidArgument("confidence level must be in (0, 1)");
  return boost::math::quantile(boost::math::normal(), 0.5 + 0.5 * level);
}

double ks_coefficient(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidArgument("alpha must be in (0, 1)");
  return std::sqrt(-0.5 * std::log(0.5 * alpha));
}

KsReport two_sample_ks(std::span<const double> a, std::span<const double> b, double alpha) {
  if (a.empty() || b.empty()) throw InvalidArgument("two_sample_ks needs nonempty samples");
  std::vector<double> x(a.begin(), a.end());
  std::vector<double> y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());

  const double n1 = double(x.size());
  const double n2 = double(y.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  // Walk both sorted samples, stepping past ties in both before comparing.
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    d = std::max(d, std::abs(double(i) / n1 - double(j) / n2));
  }
  KsReport r;
  r.distance = d;
  r.n1 = x.size();
  r.n2 = y.size();
  r.critical_value = ks_coefficient(alpha) * std::sqrt((n1 + n2) / (n1 * n2));
  r.reject = r.distance > r.critical_value;
  return r;
}

KsReport one_sample_ks(std::span<const double> sample, const std::function<double(double)>& cdf,
                       double alpha) {
  if (sample.empty()) throw InvalidArgument("one_sample_ks needs a nonempty sample");
  std::vector<double> x(sample.begin(), sample.end());
  std::sort(x.begin(), x.end());
  const double n = double(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = cdf(x[i]);
    d = std::max({d, double(i + 1) / n - f, f - double(i) / n});
  }
  KsReport r;
  r.distance = d;
  r.n1 = x.size();
  r.critical_value = ks_coefficient(alpha) / std::sqrt(n);
  r.reject = r.distance > r.critical_value;
  return r;
}

std::vector<double> empirical_cdf(std::span<const double> sample, std::span<const double> grid) {
  std::vector<double> x(sample.begin(), sample.end());
  std::sort(x.begin(), x.end());
  std::vector<double> out;
  out.reserve(grid.size());
  for (double g : grid) {
    const auto k = std::upper_bound(x.begin(), x.end(), g) - x.begin();
    out.push_back(x.empty() ? 0.0 : double(k) / double(x.size()));
  }
  return out;
}

std::vector<double> isotonic_nondecreasing(std::span<const double> values) {
  struct Block {
    double sum;
    std::size_t n;
    double mean() const { return sum / double(n); }
  };
  std::vector<Block> blocks;
  for (double v : values) {
    blocks.push_back({v, 1});
    while (blocks.size() > 1 && blocks[blocks.size() - 2].mean() > blocks.back().mean()) {
      const Block top = blocks.back();
      blocks.pop_back();
      blocks.back().sum += top.sum;
      blocks.back().n += top.n;
    }
  }
  std::vector<double> out;
  out.reserve(values.size());
  for (const auto& b : blocks) out.insert(out.end(), b.n, b.mean());
  return out;
}

double correlation(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.size() < 2)
    throw InvalidArgument("correlation needs two paired samples of size >= 2");
  RunningStats sa, sb;
  for (double v : a) sa.add(v);
  for (double v : b) sb.add(v);
  double cov = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) cov += (a[i] - sa.mean()) * (b[i] - sb.mean());
  cov /= double(a.size() - 1);
  return cov / (sa.sd() * sb.sd());
}

}  // namespace rcs
