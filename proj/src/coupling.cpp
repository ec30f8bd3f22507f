#include "rcs/coupling.hpp"

#include <algorithm>
#include <bit>
#include <ostream>

#include "rcs/core.hpp"
#include "rcs/error.hpp"
#include "rcs/stationary.hpp"

namespace rcs {

namespace {

bool in_band(double v, double eps) { return v >= 0.0 && v < eps; }

struct Starts {
  double stationary;
  double delayed;
};

Starts draw_starts(const ProcessSpec& spec, const RngStream& rng) {
  RngStream s = rng.split(0);
  const auto biased = sample_size_biased_mark(spec, s);
  const double u = s.uniform();
  const double delayed = spec.delay ? spec.delay->sample(s) : 0.0;
  return {u * biased.mark.interarrival, delayed};
}

// Mark of shared index j, given its interarrival.
MarkedArrival shared_mark(const ProcessSpec& spec, const RngStream& marks, std::uint64_t j,
                          double x) {
  RngStream s = marks.split(j);
  return MarkedArrival{0.0, spec.cluster.sample(x, s), x};
}

bool same_mark(const MarkedArrival& a, const MarkedArrival& b) {
  return a.interarrival == b.interarrival && a.offsets == b.offsets;
}

}  // namespace

CouplingRun run_coupling_from(double stationary_start, double delayed_start,
                              const InterarrivalLaw& law, double epsilon, RngStream& walk,
                              const CouplingOptions& opts) {
  if (!(epsilon > 0.0)) throw InvalidArgument("epsilon must be > 0");
  if (opts.steps_cap < 1) throw InvalidArgument("steps_cap must be >= 1");
  CouplingRun run;
  run.epsilon = epsilon;
  run.steps_cap = opts.steps_cap;
  run.stationary_start = stationary_start;
  run.delayed_start = delayed_start;

  // V is tracked as the difference of the two current epochs so that the
  // post-coupling reconstruction sees exactly the same values.
  double t = stationary_start;
  double tpp = delayed_start;
  double v = t - tpp;
  run.path.push_back({0, v});
  std::uint64_t plus = 0;
  std::uint64_t step = 0;
  if (!in_band(v, epsilon)) {
    for (step = 1; step <= opts.steps_cap; ++step) {
      const double x = law.sample(walk);
      if (walk.rademacher() > 0) {
        t += x;
        ++plus;
      } else {
        tpp += x;
      }
      v = t - tpp;
      const bool hit = in_band(v, epsilon);
      if (step < opts.full_path) {
        run.path.push_back({step, v});
      } else {
        const auto octave = std::bit_width(step / opts.full_path);
        if (hit || step % (std::uint64_t{1} << octave) == 0) run.path.push_back({step, v});
      }
      if (hit) break;
    }
    if (step > opts.steps_cap) return run;
  }
  run.tau = step;
  run.plus_count = plus;
  run.minus_count = step - plus;
  run.stationary_epoch = t;
  run.delayed_epoch = tpp;
  run.coupling_time = std::max(t, tpp);
  return run;
}

CouplingRun run_coupling(const ProcessSpec& spec, double epsilon, const RngStream& rng,
                         const CouplingOptions& opts) {
  const auto starts = draw_starts(spec, rng);
  RngStream walk = rng.split(1);
  return run_coupling_from(starts.stationary, starts.delayed, spec.interarrival, epsilon, walk,
                           opts);
}

AgreementReport post_coupling_agreement(const ProcessSpec& spec, double epsilon,
                                        std::size_t k_checks, const RngStream& rng,
                                        const CouplingOptions& opts) {
  const auto starts = draw_starts(spec, rng);
  RngStream walk = rng.split(1);
  const RngStream marks = rng.split(2);

  AgreementReport rep;
  rep.run = run_coupling_from(starts.stationary, starts.delayed, spec.interarrival, epsilon, walk,
                              opts);
  if (rep.run.capped()) return rep;
  rep.coupled = true;
  rep.tau = *rep.run.tau;
  rep.checks = k_checks;

  // Stationary process past L_tau: its arrivals are the +1 indices of the
  // shared sequence.
  std::vector<double> eta_epoch{rep.run.stationary_epoch};
  std::vector<MarkedArrival> eta_mark(1);
  // Coupled delayed process past L'_tau: driven by the flipped signs
  // -theta_j, so it advances on every index where the flipped sign is -1.
  std::vector<double> coupled_epoch{rep.run.delayed_epoch};
  std::vector<MarkedArrival> coupled_mark(1);

  for (std::uint64_t j = rep.tau + 1; eta_epoch.size() <= k_checks; ++j) {
    const double x = spec.interarrival.sample(walk);
    const int theta = walk.rademacher();
    if (theta == 1) {
      eta_epoch.push_back(eta_epoch.back() + x);
      eta_mark.push_back(shared_mark(spec, marks, j, x));
    }
    const int flipped = -theta;
    if (flipped == -1) {
      coupled_epoch.push_back(coupled_epoch.back() + x);
      coupled_mark.push_back(shared_mark(spec, marks, j, x));
    }
  }

  for (std::size_t k = 0; k <= k_checks; ++k) {
    if (!in_band(eta_epoch[k] - coupled_epoch[k], epsilon)) rep.time_violations.push_back(k);
    if (k >= 1 && !same_mark(eta_mark[k], coupled_mark[k])) rep.mark_violations.push_back(k);
  }
  return rep;
}

FlipTestReport rademacher_flip_test(std::size_t n, std::size_t n_rep, const RngStream& rng,
                                    FlipRule rule, double alpha) {
  if (n < 1 || n_rep < 1) throw InvalidArgument("flip test needs n >= 1 and n_rep >= 1");
  RngStream plain = rng.split(0);
  RngStream flipped = rng.split(1);
  std::vector<double> plain_sums(n_rep), flipped_sums(n_rep);
  std::vector<int> theta(n);

  for (std::size_t r = 0; r < n_rep; ++r) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += plain.rademacher();
    plain_sums[r] = s;

    for (auto& t : theta) t = flipped.rademacher();
    // tau as a 1-based index; n means no flip.
    std::size_t tau = n;
    if (rule == FlipRule::SecondPlus) {
      int seen = 0;
      for (std::size_t j = 0; j < n; ++j) {
        if (theta[j] == 1 && ++seen == 2) {
          tau = j + 1;
          break;
        }
      }
    } else {
      int partial = 0, best = 0;
      for (std::size_t j = 0; j < n; ++j) {
        partial += theta[j];
        if (j == 0 || partial > best) {
          best = partial;
          tau = j + 1;
        }
      }
    }
    double f = 0.0;
    for (std::size_t j = 0; j < n; ++j) f += (j + 1 <= tau) ? theta[j] : -theta[j];
    flipped_sums[r] = f;
  }

  FlipTestReport rep;
  rep.n = n;
  rep.n_rep = n_rep;
  rep.rule = rule;
  rep.ks = two_sample_ks(flipped_sums, plain_sums, alpha);
  return rep;
}

void write_coupling_csv(std::ostream& out, std::span<const CouplingRun> runs) {
  out << "epsilon,tau,coupling_time,capped\n";
  for (const auto& r : runs) {
    out << format_double(r.epsilon) << ',' << (r.tau ? std::to_string(*r.tau) : "") << ','
        << (r.coupling_time ? format_double(*r.coupling_time) : "") << ','
        << (r.capped() ? 1 : 0) << '\n';
  }
}

}  // namespace rcs
