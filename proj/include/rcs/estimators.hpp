#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rcs/process.hpp"
#include "rcs/rng.hpp"

namespace rcs {

// Monte Carlo estimate with a normal-approximation confidence interval.
struct ExperimentReport {
  double estimate = 0.0;
  double std_error = 0.0;  // sample sd / sqrt(n_rep)
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::size_t n_rep = 0;
  std::optional<double> target;  // closed-form limit, when known
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;
  std::uint64_t truncation_tally = 0;

  // |estimate - target| <= k * std_error. False without a target.
  bool within(double k) const;
};

struct EstimatorOptions {
  unsigned threads = 1;
  double level = 0.997;
  SamplingOptions sampling;
  GuardOptions guard;
};

// Report from per-replication values, accumulated in index order.
ExperimentReport summarize(std::span<const double> values, double level, const RngStream& base);

// Long-run intensity E[L]/mu, plus 1/mu when parents are included. Throws
// AccessorUnavailable when E[L] has no closed form.
double long_run_intensity(const ProcessSpec& spec);

// x * long-run intensity: the limit of E xi'(t, t+x].
double theoretical_blackwell_limit(const ProcessSpec& spec, double x);

// (b - a) * long-run intensity: E xi(a, b] for the stationary process.
double theoretical_mean_measure(const ProcessSpec& spec, double a, double b);

// Replication r uses RngStream(base.seed(), stream_id_for(base.stream_id(), r)).
RngStream replication_stream(const RngStream& base, std::size_t rep);

// Mean count in (t, t + x] of the delayed process.
ExperimentReport estimate_window_mean(const ProcessSpec& spec, double t, double x,
                                      std::size_t n_rep, const RngStream& base,
                                      const EstimatorOptions& opts = {});

// Mean of xi'(0, t] / t.
ExperimentReport estimate_elementary_ratio(const ProcessSpec& spec, double t, std::size_t n_rep,
                                           const RngStream& base,
                                           const EstimatorOptions& opts = {});

// Fraction of replications with no point in (t, t + x].
ExperimentReport estimate_void_probability(const ProcessSpec& spec, double t, double x,
                                           std::size_t n_rep, const RngStream& base,
                                           const EstimatorOptions& opts = {});

// exp{-rate (x + mean_L * integral_0^x P(Y > y) dy)} with the integral by
// adaptive Gauss-Kronrod quadrature to 1e-9. Throws Error when the quadrature
// does not converge.
double bartlett_lewis_void_probability(double rate, double mean_L,
                                       const std::function<double(double)>& step_survival,
                                       double x);

// Closed-form limit of P(no point in (t, t+x]) for Poisson
// parents with Bartlett-Lewis (or empty) clusters and parents included.
std::optional<double> void_probability_target(const ProcessSpec& spec, double x);

struct RecurrenceCdfReport {
  double t = 0.0;
  std::vector<double> grid;
  std::vector<ExperimentReport> points;  // one per grid value; estimate is F(x)
  std::uint64_t window_extensions = 0;   // replications that needed a longer window
};

// Empirical CDF of the forward recurrence time R(t) on x_grid. A replication
// that has no point after t within its window is re-simulated on the same
// stream with a doubled window.
RecurrenceCdfReport estimate_forward_recurrence_cdf(const ProcessSpec& spec, double t,
                                                    std::span<const double> x_grid,
                                                    std::size_t n_rep, const RngStream& base,
                                                    const EstimatorOptions& opts = {});

// Monte Carlo renewal function U(t) = E #{points <= t} on a grid.
struct RenewalTable {
  std::vector<double> grid;
  std::vector<double> raw;       // per-grid means
  std::vector<double> std_error;
  std::vector<double> isotonic;  // nondecreasing fit of raw
  std::size_t n_rep = 0;
  std::uint64_t truncation_tally = 0;
};

RenewalTable estimate_renewal_function(const ProcessSpec& spec, std::span<const double> t_grid,
                                       std::size_t n_rep, const RngStream& base,
                                       const EstimatorOptions& opts = {});

// Nonnegative step function: height h on [a, b).
struct StepPiece {
  double a = 0.0;
  double b = 0.0;
  double height = 0.0;
};

class StepFunction {
 public:
  StepFunction() = default;
  // Throws InvalidArgument for overlapping, empty, negative, or unbounded pieces.
  explicit StepFunction(std::vector<StepPiece> pieces);

  static StepFunction indicator(double a, double b) { return StepFunction({{a, b, 1.0}}); }

  double operator()(double y) const noexcept;
  double integral() const noexcept;
  const std::vector<StepPiece>& pieces() const noexcept { return pieces_; }
  double support_lo() const noexcept;
  double support_hi() const noexcept;

 private:
  std::vector<StepPiece> pieces_;
};

enum class TableColumn { Raw, Isotonic };

// Riemann-Stieltjes sum of g(t - y) against the increments of the table,
// evaluating g at the right end of each grid cell. Throws WindowError when
// g's support reaches outside [0, t] or outside the tabulated range.
double key_renewal_convolve(const RenewalTable& table, const StepFunction& g, double t,
                            TableColumn column = TableColumn::Raw);

// long-run intensity * integral of g.
double key_renewal_limit(const ProcessSpec& spec, const StepFunction& g);

// Fixed CSV columns.
inline constexpr const char* kReportCsvHeader =
    "estimate,std_error,ci_low,ci_high,n_rep,target,seed,truncation_tally";

void write_report_csv(std::ostream& out, std::span<const ExperimentReport> reports);
std::vector<ExperimentReport> read_report_csv(std::istream& in);
// One JSON object per line.
void write_report_jsonl(std::ostream& out, std::span<const ExperimentReport> reports,
                        const std::string& label);

}  // namespace rcs
