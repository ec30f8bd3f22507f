#include "rcs/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "rcs/detail/overloaded.hpp"
#include "rcs/error.hpp"
#include "rcs/parallel.hpp"
#include "rcs/stats.hpp"

namespace rcs {

unsigned resolve_threads(unsigned requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("RCS_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<unsigned>(v);
    } catch (const std::exception&) {
    }
  }
  return 1;
}

bool ExperimentReport::within(double k) const {
  return target && std::abs(estimate - *target) <= k * std_error;
}

ExperimentReport summarize(std::span<const double> values, double level, const RngStream& base) {
  RunningStats st;
  for (double v : values) st.add(v);
  ExperimentReport r;
  r.estimate = st.mean();
  r.std_error = st.std_error();
  const double half = normal_z(level) * r.std_error;
  r.ci_low = r.estimate - half;
  r.ci_high = r.estimate + half;
  r.n_rep = st.count();
  r.seed = base.seed();
  r.stream_id = base.stream_id();
  return r;
}

double long_run_intensity(const ProcessSpec& spec) {
  const auto mean_l = spec.cluster.mean_size(spec.interarrival);
  if (!mean_l) throw AccessorUnavailable("E[L] has no closed form for " + spec.cluster.describe());
  return (*mean_l + (spec.include_parents ? 1.0 : 0.0)) / spec.mean_interarrival();
}

double theoretical_blackwell_limit(const ProcessSpec& spec, double x) {
  if (!(x > 0.0)) throw InvalidArgument("x must be > 0");
  return x * long_run_intensity(spec);
}

double theoretical_mean_measure(const ProcessSpec& spec, double a, double b) {
  if (!(a <= b)) throw InvalidArgument("mean measure needs a <= b");
  return (b - a) * long_run_intensity(spec);
}

RngStream replication_stream(const RngStream& base, std::size_t rep) {
  return RngStream(base.seed(), stream_id_for(base.stream_id(), rep));
}

namespace {

struct RepValue {
  double value = 0.0;
  std::uint64_t tally = 0;
};

std::optional<double> blackwell_target(const ProcessSpec& spec, double x) {
  try {
    return theoretical_blackwell_limit(spec, x);
  } catch (const AccessorUnavailable&) {
    return std::nullopt;
  }
}

template <class Fn>
ExperimentReport run_reps(std::size_t n_rep, const RngStream& base, const EstimatorOptions& opts,
                          Fn&& per_rep) {
  if (n_rep < 2) throw InvalidArgument("n_rep must be >= 2");
  const auto reps = parallel_map<RepValue>(n_rep, resolve_threads(opts.threads), per_rep);
  std::vector<double> values(n_rep);
  std::uint64_t tally = 0;
  for (std::size_t i = 0; i < n_rep; ++i) {
    values[i] = reps[i].value;
    tally += reps[i].tally;
  }
  auto report = summarize(values, opts.level, base);
  report.truncation_tally = tally;
  return report;
}

template <class Fn>
ExperimentReport window_experiment(const ProcessSpec& spec, double lo, double hi,
                                   std::size_t n_rep, const RngStream& base,
                                   const EstimatorOptions& opts, Fn&& value_of) {
  const auto guard = guard_band(spec, base.seed(), opts.guard);
  return run_reps(n_rep, base, opts, [&](std::size_t r) {
    RngStream s = replication_stream(base, r);
    const auto sample = sample_renewal_cluster_process(spec, lo, hi, guard, s, opts.sampling);
    return RepValue{value_of(sample.pattern.count_in(lo, hi)), sample.truncation_tally};
  });
}

}  // namespace

ExperimentReport estimate_window_mean(const ProcessSpec& spec, double t, double x,
                                      std::size_t n_rep, const RngStream& base,
                                      const EstimatorOptions& opts) {
  if (!(t >= 0.0) || !(x > 0.0)) throw InvalidArgument("window mean needs t >= 0 and x > 0");
  auto report = window_experiment(spec, t, t + x, n_rep, base, opts,
                                  [](std::size_t c) { return double(c); });
  report.target = blackwell_target(spec, x);
  return report;
}

ExperimentReport estimate_elementary_ratio(const ProcessSpec& spec, double t, std::size_t n_rep,
                                           const RngStream& base, const EstimatorOptions& opts) {
  if (!(t > 0.0)) throw InvalidArgument("elementary ratio needs t > 0");
  auto report = window_experiment(spec, 0.0, t, n_rep, base, opts,
                                  [t](std::size_t c) { return double(c) / t; });
  try {
    report.target = long_run_intensity(spec);
  } catch (const AccessorUnavailable&) {
  }
  return report;
}

ExperimentReport estimate_void_probability(const ProcessSpec& spec, double t, double x,
                                           std::size_t n_rep, const RngStream& base,
                                           const EstimatorOptions& opts) {
  if (!(t >= 0.0) || !(x > 0.0)) throw InvalidArgument("void probability needs t >= 0 and x > 0");
  auto report = window_experiment(spec, t, t + x, n_rep, base, opts,
                                  [](std::size_t c) { return c == 0 ? 1.0 : 0.0; });
  report.target = void_probability_target(spec, x);
  return report;
}

double bartlett_lewis_void_probability(double rate, double mean_L,
                                       const std::function<double(double)>& step_survival,
                                       double x) {
  if (!(rate > 0.0) || !(mean_L >= 0.0) || !(x >= 0.0))
    throw InvalidArgument("void probability needs rate > 0, mean_L >= 0, x >= 0");
  if (x == 0.0) return 1.0;
  double integral = 0.0;
  if (mean_L > 0.0) {
    const double s0 = step_survival(0.0);
    const double sx = step_survival(x);
    if (!(s0 >= sx && sx >= 0.0 && s0 <= 1.0))
      throw InvalidArgument("step survival must be nonincreasing with values in [0, 1]");
    double error = 0.0;
    integral = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
        step_survival, 0.0, x, 20, 1e-9, &error);
    if (!(error <= 1e-9 * std::max(1.0, std::abs(integral))))
      throw Error("void probability quadrature did not converge (error estimate " +
                  std::to_string(error) + ")");
  }
  return std::exp(-rate * (x + mean_L * integral));
}

std::optional<double> void_probability_target(const ProcessSpec& spec, double x) {
  const auto* expo = std::get_if<law::Exponential>(&spec.interarrival.variant());
  if (!expo || !spec.include_parents) return std::nullopt;
  if (spec.cluster.is_empty())
    return bartlett_lewis_void_probability(expo->rate, 0.0, [](double) { return 1.0; }, x);
  const auto* bl = std::get_if<cluster::BartlettLewis>(&spec.cluster.variant());
  if (!bl) return std::nullopt;
  const InterarrivalLaw step = bl->step;
  return bartlett_lewis_void_probability(
      expo->rate, bl->size.mean(), [step](double y) { return step.survival(y); }, x);
}

RecurrenceCdfReport estimate_forward_recurrence_cdf(const ProcessSpec& spec, double t,
                                                    std::span<const double> x_grid,
                                                    std::size_t n_rep, const RngStream& base,
                                                    const EstimatorOptions& opts) {
  if (!(t >= 0.0)) throw InvalidArgument("forward recurrence needs t >= 0");
  if (n_rep < 2) throw InvalidArgument("n_rep must be >= 2");
  if (!std::is_sorted(x_grid.begin(), x_grid.end()) ||
      (!x_grid.empty() && x_grid.front() < 0.0))
    throw InvalidArgument("x_grid must be sorted and nonnegative");

  const auto guard = guard_band(spec, base.seed(), opts.guard);
  const double initial = 10.0 * spec.mean_interarrival() + (x_grid.empty() ? 0.0 : x_grid.back());
  constexpr int kMaxDoublings = 40;

  struct Gap {
    double gap = 0.0;
    std::uint64_t tally = 0;
    std::uint64_t extensions = 0;
  };
  const auto gaps = parallel_map<Gap>(n_rep, resolve_threads(opts.threads), [&](std::size_t r) {
    double width = initial;
    for (int d = 0; d <= kMaxDoublings; ++d, width *= 2.0) {
      // Same stream on every attempt: a longer window extends the same
      // realization rather than drawing a new one.
      RngStream s = replication_stream(base, r);
      const auto sample =
          sample_renewal_cluster_process(spec, t, t + width, guard, s, opts.sampling);
      if (const double* p = sample.pattern.first_after(t))
        return Gap{*p - t, sample.truncation_tally, std::uint64_t(d)};
    }
    throw Error("no point after t = " + std::to_string(t) + " within the extended window");
  });

  RecurrenceCdfReport out;
  out.t = t;
  out.grid.assign(x_grid.begin(), x_grid.end());
  std::uint64_t tally = 0;
  for (const auto& g : gaps) {
    tally += g.tally;
    out.window_extensions += g.extensions > 0 ? 1 : 0;
  }
  std::vector<double> indicator(n_rep);
  for (double x : x_grid) {
    for (std::size_t r = 0; r < n_rep; ++r) indicator[r] = gaps[r].gap <= x ? 1.0 : 0.0;
    auto report = summarize(indicator, opts.level, base);
    report.truncation_tally = tally;
    if (x == 0.0) {
      report.target = 0.0;
    } else if (const auto v = void_probability_target(spec, x)) {
      report.target = 1.0 - *v;
    }
    out.points.push_back(report);
  }
  return out;
}

RenewalTable estimate_renewal_function(const ProcessSpec& spec, std::span<const double> t_grid,
                                       std::size_t n_rep, const RngStream& base,
                                       const EstimatorOptions& opts) {
  if (t_grid.empty() || !std::is_sorted(t_grid.begin(), t_grid.end()))
    throw InvalidArgument("t_grid must be nonempty and sorted");
  if (n_rep < 2) throw InvalidArgument("n_rep must be >= 2");
  const auto guard = guard_band(spec, base.seed(), opts.guard);
  // Parents live on [0, inf) and offsets reach back at most the guard width,
  // so this lower edge sees every point except truncated clusters.
  const double lo = std::min(0.0, t_grid.front()) - guard.width - 1.0;
  const double hi = std::max(t_grid.back(), lo + 1.0);
  const std::size_t G = t_grid.size();

  struct Counts {
    std::vector<double> counts;
    std::uint64_t tally = 0;
  };
  const auto reps = parallel_map<Counts>(n_rep, resolve_threads(opts.threads), [&](std::size_t r) {
    RngStream s = replication_stream(base, r);
    const auto sample = sample_renewal_cluster_process(spec, lo, hi, guard, s, opts.sampling);
    Counts c;
    c.counts.resize(G);
    for (std::size_t g = 0; g < G; ++g) c.counts[g] = double(sample.pattern.count_upto(t_grid[g]));
    c.tally = sample.truncation_tally;
    return c;
  });

  RenewalTable table;
  table.grid.assign(t_grid.begin(), t_grid.end());
  table.n_rep = n_rep;
  std::vector<RunningStats> stats(G);
  for (const auto& c : reps) {
    for (std::size_t g = 0; g < G; ++g) stats[g].add(c.counts[g]);
    table.truncation_tally += c.tally;
  }
  for (const auto& st : stats) {
    table.raw.push_back(st.mean());
    table.std_error.push_back(st.std_error());
  }
  table.isotonic = isotonic_nondecreasing(table.raw);
  return table;
}

StepFunction::StepFunction(std::vector<StepPiece> pieces) : pieces_(std::move(pieces)) {
  std::sort(pieces_.begin(), pieces_.end(),
            [](const StepPiece& l, const StepPiece& r) { return l.a < r.a; });
  for (std::size_t k = 0; k < pieces_.size(); ++k) {
    const auto& p = pieces_[k];
    if (!(std::isfinite(p.a) && std::isfinite(p.b) && p.a < p.b))
      throw InvalidArgument("step pieces need finite a < b");
    if (!(std::isfinite(p.height) && p.height >= 0.0))
      throw InvalidArgument("step heights must be finite and nonnegative");
    if (k > 0 && p.a < pieces_[k - 1].b) throw InvalidArgument("step pieces overlap");
  }
}

double StepFunction::operator()(double y) const noexcept {
  for (const auto& p : pieces_)
    if (p.a <= y && y < p.b) return p.height;
  return 0.0;
}

double StepFunction::integral() const noexcept {
  double s = 0.0;
  for (const auto& p : pieces_) s += p.height * (p.b - p.a);
  return s;
}

double StepFunction::support_lo() const noexcept {
  return pieces_.empty() ? 0.0 : pieces_.front().a;
}

double StepFunction::support_hi() const noexcept {
  return pieces_.empty() ? 0.0 : pieces_.back().b;
}

double key_renewal_convolve(const RenewalTable& table, const StepFunction& g, double t,
                            TableColumn column) {
  if (g.pieces().empty()) return 0.0;
  const auto& u = column == TableColumn::Raw ? table.raw : table.isotonic;
  const auto& y = table.grid;
  if (y.size() < 2) throw WindowError("renewal table needs at least two grid points");
  if (g.support_lo() < 0.0 || g.support_hi() > t)
    throw WindowError("step function support exceeds [0, t]");
  if (t - g.support_hi() < y.front() || t - g.support_lo() > y.back())
    throw WindowError("step function support exceeds the tabulated range");

  // Cells (y[i-1], y[i]] with g evaluated at t - y[i]. Consecutive cells with
  // the same height are telescoped, so an indicator reproduces the table
  // difference exactly.
  double total = 0.0;
  std::size_t i = 1;
  while (i < y.size()) {
    const double h = g(t - y[i]);
    std::size_t j = i;
    while (j + 1 < y.size() && g(t - y[j + 1]) == h) ++j;
    if (h != 0.0) total += h * (u[j] - u[i - 1]);
    i = j + 1;
  }
  return total;
}

double key_renewal_limit(const ProcessSpec& spec, const StepFunction& g) {
  return long_run_intensity(spec) * g.integral();
}

}  // namespace rcs
