// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "rcs/config.hpp"
#include "rcs/estimators.hpp"
#include "rcs/runner.hpp"
#include "rcs/stationary.hpp"
#include "rcs/stats.hpp"

using namespace rcs;

namespace {

struct Result {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

ProcessSpec bartlett_lewis() {
  return bartlett_lewis_preset(1.0, SizeLaw::poisson(1.0), InterarrivalLaw::exponential(1.0));
}

ExperimentConfig experiment(ProcessSpec spec, ExperimentKind kind, std::size_t reps) {
  ExperimentConfig c;
  c.spec = std::move(spec);
  c.kind = kind;
  c.n_rep = reps;
  c.seed = 2024;
  return c;
}

std::string ci_text(const ExperimentReport& r) {
  std::string s = "estimate=" + fmt(r.estimate) + " se=" + fmt(r.std_error) + " ci=[" +
                  fmt(r.ci_low) + ", " + fmt(r.ci_high) + "]";
  if (r.target) s += " target=" + fmt(*r.target);
  return s;
}

bool ci_contains(const ExperimentReport& r) {
  return r.target && r.ci_low <= *r.target && *r.target <= r.ci_high;
}

// Experiments reused by the determinism criterion.
ExperimentConfig criterion1_config() {
  auto c = experiment(threshold_uniform_preset(), ExperimentKind::WindowMean, 10'000);
  c.params.t = 500.0;
  c.params.x = 1.0;
  return c;
}

ExperimentConfig criterion3_config() {
  auto c = experiment(bartlett_lewis(), ExperimentKind::VoidProb, 100'000);
  c.params.t = 200.0;
  c.params.x = 1.0;
  return c;
}

ExperimentConfig criterion8_config() {
  ProcessSpec spec;
  spec.interarrival = InterarrivalLaw::uniform(0, 5);
  auto c = experiment(spec, ExperimentKind::Coupling, 1000);
  c.params.epsilon = 0.1;
  c.params.steps_cap = 10'000'000;
  c.params.k_checks = 100;
  c.params.min_coupled = 0.99;
  return c;
}

ExperimentConfig criterion9_config() {
  auto c = experiment(ProcessSpec{}, ExperimentKind::FlipTest, 100'000);
  c.params.n = 20;
  c.params.alpha = 0.01;
  return c;
}

Result blackwell_threshold() {
  const auto out = run_experiment(criterion1_config(), 1);
  const auto& r = out.reports.at(0);
  const bool ok = r.target && std::abs(*r.target - 0.56) < 1e-12 && ci_contains(r);
  return {ok, "99.7% CI must contain 0.56; " + ci_text(r)};
}

Result elementary_threshold() {
  auto c = experiment(threshold_uniform_preset(), ExperimentKind::Elementary, 200);
  c.params.t = 1e4;
  const auto r = run_experiment(c, 1).reports.at(0);
  return {std::abs(r.estimate - 0.56) <= 0.01, "|estimate - 0.56| <= 0.01; " + ci_text(r)};
}

Result void_probability() {
  const auto r = run_experiment(criterion3_config(), 1).reports.at(0);
  const bool ok = r.target && std::abs(*r.target - 0.19552) < 5e-5 && r.within(4.0);
  return {ok, "within 4 SE of the closed form; " + ci_text(r) +
                  " |err|/se=" + fmt(std::abs(r.estimate - r.target.value_or(0)) / r.std_error)};
}

Result recurrence_cdf() {
  const auto spec = bartlett_lewis();
  std::vector<double> grid;
  for (int i = 0; i < 20; ++i) grid.push_back(3.0 * i / 19.0);
  const RngStream base(2024, experiment_stream_id(ExperimentKind::RecurrenceCdf));
  const auto rep = estimate_forward_recurrence_cdf(spec, 200.0, grid, 100'000, base);
  double max_err = 0.0;
  bool all_targets = true;
  for (const auto& p : rep.points) {
    if (!p.target) all_targets = false;
    else max_err = std::max(max_err, std::abs(p.estimate - *p.target));
  }
  return {all_targets && max_err < 0.01,
          "max |F_n - F| over 20 points on [0, 3] < 0.01; max=" + fmt(max_err)};
}

Result blackwell_bartlett_lewis() {
  auto c = experiment(bartlett_lewis(), ExperimentKind::WindowMean, 10'000);
  c.params.t = 200.0;
  c.params.x = 1.0;
  const auto r = run_experiment(c, 1).reports.at(0);
  const bool ok = r.target && std::abs(*r.target - 2.0) < 1e-12 && ci_contains(r);
  return {ok, "99.7% CI must contain rate (E L + 1) x = 2; " + ci_text(r)};
}

Result stationarity() {
  auto c = experiment(threshold_uniform_preset(), ExperimentKind::StationarityCheck, 10'000);
  c.params.shifts = {0.0, 37.7, 200.0};
  c.params.length = 5.0;
  c.params.alpha = 0.01;
  const auto out = run_experiment(c, 1);
  std::string detail = "pairwise KS of counts on (s, s+5], no rejection at alpha 0.01;";
  const auto& lines = out.summary;
  for (std::size_t i = 0; i + 1 < lines.size(); ++i) detail += " [" + lines[i] + "]";
  return {out.passed, detail};
}

Result size_biasing() {
  ProcessSpec uniform;
  uniform.interarrival = InterarrivalLaw::uniform(0, 5);
  RngStream rng(2024, hash_name("acceptance-size-bias"));
  RunningStats xs;
  for (int i = 0; i < 100'000; ++i) xs.add(sample_size_biased_mark(uniform, rng).mark.interarrival);
  const bool mean_ok = std::abs(xs.mean() - 10.0 / 3.0) <= 4.0 * xs.std_error();

  const auto spec = threshold_uniform_preset();
  const double mu = spec.mean_interarrival();
  RngStream biased = rng.split(1), plain = rng.split(2);
  RunningStats lhs, rhs;
  for (int i = 0; i < 100'000; ++i) {
    lhs.add(sample_size_biased_mark(spec, biased).mark.interarrival > 1.0 ? 1.0 : 0.0);
    const double x = sample_interarrival(spec.interarrival, plain);
    (void)sample_cluster(spec.cluster, x, plain);
    rhs.add(x > 1.0 ? x / mu : 0.0);
  }
  const double se = std::hypot(lhs.std_error(), rhs.std_error());
  const bool ident_ok = std::abs(lhs.mean() - rhs.mean()) <= 4.0 * se;
  return {mean_ok && ident_ok,
          "E[X*]=" + fmt(xs.mean()) + " (se " + fmt(xs.std_error()) + ", target 10/3); " +
              "P(X*>1)=" + fmt(lhs.mean()) + " vs E[X 1{X>1}]/mu=" + fmt(rhs.mean()) +
              " (combined se " + fmt(se) + ")"};
}

Result coupling() {
  const auto out = run_experiment(criterion8_config(), 1);
  return {out.passed, out.summary.empty() ? "" : out.summary.back()};
}

Result flip_test() {
  const auto out = run_experiment(criterion9_config(), 1);
  return {out.passed, out.summary.empty() ? "" : out.summary.back()};
}

Result key_renewal() {
  const auto spec = threshold_uniform_preset();
  const StepFunction g({{0.0, 1.0, 1.0}, {2.0, 4.0, 0.5}});
  const double t = 500.0;
  std::vector<double> grid;
  for (double y = std::floor(t - g.support_hi()) - 1.0; y <= t + 1e-12; y += 0.5) grid.push_back(y);
  const RngStream base(2024, experiment_stream_id(ExperimentKind::KeyRenewal));
  const auto table = estimate_renewal_function(spec, grid, 100'000, base);
  const double conv = key_renewal_convolve(table, g, t);
  const double limit = key_renewal_limit(spec, g);
  const bool close = std::abs(limit - 1.12) < 1e-12 && std::abs(conv - limit) <= 0.02 * limit;

  bool exact = true;
  auto at = [&](double y) {
    for (std::size_t i = 0; i < grid.size(); ++i)
      if (grid[i] == y) return table.raw[i];
    exact = false;
    return std::nan("");
  };
  for (double x : {0.5, 1.0, 2.0, 3.5, 5.0})
    exact = exact && key_renewal_convolve(table, StepFunction::indicator(0.0, x), t) ==
                         at(t) - at(t - x);
  return {close && exact, "convolution=" + fmt(conv) + " limit=" + fmt(limit) +
                              " rel err=" + fmt(std::abs(conv - limit) / limit) +
                              "; indicator identity exact: " + (exact ? "yes" : "no")};
}

Result determinism() {
  std::string detail;
  bool ok = true;
  for (const auto& [name, cfg] : {std::pair{"window_mean", criterion1_config()},
                                  std::pair{"void_prob", criterion3_config()},
                                  std::pair{"coupling", criterion8_config()},
                                  std::pair{"flip_test", criterion9_config()}}) {
    const auto one = run_experiment(cfg, 1);
    const auto four = run_experiment(cfg, 4);
    bool same = one.artifacts == four.artifacts;
    ok = ok && same;
    detail += std::string(name) + (same ? " identical; " : " DIFFERS; ");
  }
  return {ok, "threads 1 vs 4, all CSV artifacts byte-identical: " + detail};
}

struct Criterion {
  int id;
  const char* name;
  double budget_s;  // 0: no stated runtime bound
  std::function<Result()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "Blackwell limit, threshold preset (t=500, x=1, 1e4 reps)", 120, blackwell_threshold},
      {2, "elementary ratio, threshold preset (t=1e4, 200 reps)", 120, elementary_threshold},
      {3, "Bartlett-Lewis void probability (t=200, x=1, 1e5 reps)", 300, void_probability},
      {4, "Bartlett-Lewis forward recurrence CDF (1e5 reps)", 600, recurrence_cdf},
      {5, "Blackwell limit, Bartlett-Lewis with parents (t=200, x=1)", 120, blackwell_bartlett_lewis},
      {6, "stationary window counts across shifts {0, 37.7, 200}", 0, stationarity},
      {7, "size-biasing identity", 0, size_biasing},
      {8, "coupling: finite tau and post-tau agreement (1e3 runs)", 0, coupling},
      {9, "sign flip after a stopping time vs peek-ahead control", 0, flip_test},
      {10, "key renewal convolution at t=500 and indicator identity", 0, key_renewal},
      {11, "determinism across thread counts", 0, determinism},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Result r;
    try {
      r = c.run();
    } catch (const std::exception& e) {
      r = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    bool pass = r.pass;
    std::string timing = fmt(secs) + "s";
    if (c.budget_s > 0) {
      timing += " of " + fmt(c.budget_s) + "s";
      if (secs > c.budget_s) pass = false;
    }
    if (!pass) ++failures;
    std::printf("[%s] %2d %s: %s (%s)\n", pass ? "PASS" : "FAIL", c.id, c.name, r.detail.c_str(),
                timing.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", int(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
