#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace rcs {

// Welford accumulator. Accumulation order is part of the result, so callers
// feed values in replication-index order.
class RunningStats {
 public:
  void add(double x) noexcept;

  std::size_t count() const noexcept { return n_; }
  double mean() const noexcept { return mean_; }
  // Sample variance (n - 1 denominator); 0 for fewer than two values.
  double variance() const noexcept;
  double sd() const noexcept;
  // sd / sqrt(n)
  double std_error() const noexcept;

 private:
  std::size_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

// Two-sided standard normal quantile for a central interval of `level`,
// e.g. 0.997 -> 2.9677.
double normal_z(double level);

struct KsReport {
  double distance = 0.0;
  double critical_value = 0.0;
  std::size_t n1 = 0;
  std::size_t n2 = 0;
  bool reject = false;  // distance > critical_value
};

// Asymptotic Kolmogorov coefficient c(alpha) = sqrt(-ln(alpha / 2) / 2).
double ks_coefficient(double alpha);

// Two-sample Kolmogorov-Smirnov test. Throws InvalidArgument on an empty
// sample or alpha outside (0, 1).
KsReport two_sample_ks(std::span<const double> a, std::span<const double> b, double alpha);

// One-sample KS distance sup |F_n - F| against a continuous cdf.
KsReport one_sample_ks(std::span<const double> sample, const std::function<double(double)>& cdf,
                       double alpha);

// F_n(g) = #{x <= g} / n for each grid value g. Grid must be sorted.
std::vector<double> empirical_cdf(std::span<const double> sample, std::span<const double> grid);

// Least-squares nondecreasing fit (pool adjacent violators).
std::vector<double> isotonic_nondecreasing(std::span<const double> values);

// Pearson correlation of paired samples.
double correlation(std::span<const double> a, std::span<const double> b);

}  // namespace rcs
