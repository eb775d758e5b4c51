#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#if defined(__GLIBC__)
#include <malloc.h>
#endif

#include "automaton.hpp"
#include "check.hpp"
#include "lincheck.hpp"
#include "outcome.hpp"
#include "pairgraph.hpp"
#include "rng.hpp"

namespace linsync {

// ---------------------------------------------------------------------------
// Trial counts.

// t·n random automata give f_n to within epsilon with confidence p0 when
// t >= -(n / (2 epsilon^2)) ln((1 - p0) / 2).
struct TrialPlan {
  std::size_t n = 0;
  double epsilon = 0.0;
  double p0 = 0.0;
  std::uint64_t t = 0;
  std::uint64_t total_runs = 0;

  // Same accuracy target with a larger multiplier.
  TrialPlan with_multiplier(std::uint64_t larger_t) const {
    if (larger_t < t) throw std::invalid_argument("with_multiplier: multiplier below the required count");
    TrialPlan p = *this;
    p.t = larger_t;
    p.total_runs = larger_t * n;
    return p;
  }
};

inline double trial_bound(std::size_t n, double epsilon, double p0) {
  return -(static_cast<double>(n) / (2.0 * epsilon * epsilon)) * std::log((1.0 - p0) / 2.0);
}

inline TrialPlan required_trials(std::size_t n, double epsilon, double p0) {
  if (n < 1) throw std::invalid_argument("required_trials: n must be positive");
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw std::invalid_argument("required_trials: epsilon must be positive");
  if (!(p0 > 0.0 && p0 < 1.0)) throw std::invalid_argument("required_trials: p0 must lie in (0, 1)");
  const double bound = trial_bound(n, epsilon, p0);
  auto t = static_cast<std::uint64_t>(std::ceil(bound));
  // Guard against ceil landing one off after rounding.
  while (t > 0 && static_cast<double>(t - 1) >= bound) --t;
  while (static_cast<double>(t) < bound) ++t;
  t = std::max<std::uint64_t>(t, 1);
  return {n, epsilon, p0, t, t * n};
}

// ---------------------------------------------------------------------------
// f_n estimation.

inline constexpr std::string_view kNotSynchronizingColumn = "not_synchronizing";

struct FnReport {
  std::size_t n = 0;
  std::uint64_t total_runs = 0;
  std::uint64_t failure_count = 0;
  double estimate = 0.0;
  double epsilon = 0.0;
  double p0 = 0.0;
  std::uint64_t t = 0;
  std::uint64_t seed = 0;
  std::map<FailReason, std::uint64_t> reasons;
  std::uint64_t not_synchronizing = 0;  // Step-1 negatives, counted in failure_count
};

namespace detail {

struct FnTally {
  std::uint64_t failures = 0;
  std::uint64_t not_sync = 0;
  std::map<FailReason, std::uint64_t> reasons;

  void merge(const FnTally& o) {
    failures += o.failures;
    not_sync += o.not_sync;
    for (const auto& [r, c] : o.reasons) reasons[r] += c;
  }
};

inline FnTally run_fn_trials(std::size_t n, std::uint64_t seed, std::uint64_t begin, std::uint64_t end) {
  FnTally tally;
  for (std::uint64_t i = begin; i < end; ++i) {
    const auto out = binary_linear_check(generate_uniform(n, 2, derive_seed(seed, i)));
    if (out.verdict == Verdict::Synchronizing) continue;
    ++tally.failures;
    if (out.is_fail()) ++tally.reasons[*out.reason];
    else ++tally.not_sync;
  }
  return tally;
}

}  // namespace detail

// Trial i uses the automaton generated from derive_seed(seed, i), so the
// report does not depend on the thread count.
inline FnReport estimate_fn(std::size_t n, const TrialPlan& plan, std::uint64_t seed, unsigned threads = 1) {
  if (n < 2) throw std::invalid_argument("estimate_fn: n must be at least 2");
  if (plan.t == 0 || plan.total_runs != plan.t * n) throw std::invalid_argument("estimate_fn: plan does not match n");
  const std::uint64_t total = plan.total_runs;
  threads = std::max(1u, threads);

  detail::FnTally tally;
  if (threads == 1) {
    tally = detail::run_fn_trials(n, seed, 0, total);
  } else {
    std::vector<detail::FnTally> parts(threads);
    std::vector<std::thread> workers;
    for (unsigned w = 0; w < threads; ++w) {
      const std::uint64_t b = total * w / threads, e = total * (w + 1) / threads;
      workers.emplace_back([&parts, w, n, seed, b, e] { parts[w] = detail::run_fn_trials(n, seed, b, e); });
    }
    for (auto& th : workers) th.join();
    for (const auto& p : parts) tally.merge(p);
  }

  FnReport rep;
  rep.n = n;
  rep.total_runs = total;
  rep.failure_count = tally.failures;
  rep.estimate = static_cast<double>(tally.failures) / static_cast<double>(plan.t);
  rep.epsilon = plan.epsilon;
  rep.p0 = plan.p0;
  rep.t = plan.t;
  rep.seed = seed;
  rep.reasons = std::move(tally.reasons);
  rep.not_synchronizing = tally.not_sync;
  return rep;
}

// ---------------------------------------------------------------------------
// Timing.

using Clock = std::chrono::steady_clock;

inline constexpr int kWarmupRuns = 2;

struct TimingRow {
  std::size_t n = 0;
  std::size_t k = 0;
  std::size_t reps = 0;
  double mean_seconds = 0.0;
};

namespace detail {

inline double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Keeps freed buffers in the heap so that large runs are not dominated by
// fresh page faults on every call. Applied once per process.
inline void retain_heap_for_timing() {
#if defined(__GLIBC__)
  static const bool once = [] {
    mallopt(M_MMAP_THRESHOLD, 1 << 30);
    mallopt(M_TRIM_THRESHOLD, 1 << 30);
    return true;
  }();
  (void)once;
#endif
}

// Keeps results observable so timed calls are not optimised away.
inline volatile std::uint64_t timing_sink = 0;

inline double time_linear(const Automaton& A, const CheckOptions& opts) {
  const auto start = Clock::now();
  const auto res = linear_part(A, opts);
  const double s = seconds_since(start);
  timing_sink = timing_sink + static_cast<std::uint64_t>(res.outcome.verdict);
  return s;
}

}  // namespace detail

// Mean time of the linear part alone (a failing guard returns without the
// oracle). Generation is not timed; two warm-up runs per cell are discarded.
inline std::vector<TimingRow> bench_linear(const std::vector<std::size_t>& ns, const std::vector<std::size_t>& ks,
                                           std::size_t reps, std::uint64_t seed, const CheckOptions& opts = {}) {
  if (reps < 1) throw std::invalid_argument("bench_linear: reps must be positive");
  detail::retain_heap_for_timing();
  std::vector<TimingRow> rows;
  std::uint64_t cell = 0;
  for (auto n : ns) {
    for (auto k : ks) {
      const std::uint64_t cell_seed = derive_seed(seed, cell++);
      double total = 0.0;
      for (std::size_t i = 0; i < reps + kWarmupRuns; ++i) {
        const auto A = generate_uniform(n, k, derive_seed(cell_seed, i));
        const double s = detail::time_linear(A, opts);
        if (i >= kWarmupRuns) total += s;
      }
      rows.push_back({n, k, reps, total / static_cast<double>(reps)});
    }
  }
  return rows;
}

// (t_lin + f t_quad) / (n + f): expected time per automaton of the main
// algorithm when f out of every n automata need the oracle.
inline double main_time_formula(std::size_t n, double t_lin, double t_quad, double fn) {
  return (t_lin + fn * t_quad) / (static_cast<double>(n) + fn);
}

struct MainTimeEstimate {
  std::size_t n = 0;
  double fn = 0.0;
  double t_lin = 0.0;   // total linear time over n automata
  double t_quad = 0.0;  // mean oracle time
  double estimate = 0.0;
};

inline constexpr std::size_t kDefaultQuadRuns = 5;

inline MainTimeEstimate estimate_main_time(std::size_t n, double fn_cap, std::uint64_t seed,
                                           std::size_t quad_runs = kDefaultQuadRuns,
                                           std::size_t oracle_cap = kDefaultOracleCap) {
  if (n < 1) throw std::invalid_argument("estimate_main_time: n must be positive");
  if (fn_cap < 0.0) throw std::invalid_argument("estimate_main_time: f_n must be non-negative");
  if (quad_runs < 1) throw std::invalid_argument("estimate_main_time: quad_runs must be positive");
  if (n > std::min(oracle_cap, kMaxOracleCap)) throw OracleLimitError(n, std::min(oracle_cap, kMaxOracleCap));

  detail::retain_heap_for_timing();
  MainTimeEstimate est;
  est.n = n;
  est.fn = fn_cap;
  const std::uint64_t lin_seed = derive_seed(seed, 0), quad_seed = derive_seed(seed, 1);
  for (std::size_t i = 0; i < n + kWarmupRuns; ++i) {
    const auto A = generate_uniform(n, 2, derive_seed(lin_seed, i));
    const double s = detail::time_linear(A, {});
    if (i >= kWarmupRuns) est.t_lin += s;
  }
  double quad_total = 0.0;
  for (std::size_t i = 0; i < quad_runs + kWarmupRuns; ++i) {
    const auto A = generate_uniform(n, 2, derive_seed(quad_seed, i));
    const auto start = Clock::now();
    const bool sync = synch_slow(A, oracle_cap);
    const double s = detail::seconds_since(start);
    detail::timing_sink = detail::timing_sink + sync;
    if (i >= kWarmupRuns) quad_total += s;
  }
  est.t_quad = quad_total / static_cast<double>(quad_runs);
  est.estimate = main_time_formula(n, est.t_lin, est.t_quad, fn_cap);
  return est;
}

// ---------------------------------------------------------------------------
// Crossover.

struct CrossoverRow {
  std::size_t n = 0;
  double mean_main = 0.0;
  double mean_quadratic = 0.0;
};

struct CrossoverReport {
  std::vector<CrossoverRow> rows;
  std::optional<std::size_t> n0;  // least n whose main mean beats the quadratic mean
};

// Per n, both algorithms run over the same batch of automata; each batch is
// timed as a whole and divided by its size.
inline CrossoverRow time_crossover_point(std::size_t n, std::size_t runs, std::uint64_t seed,
                                         std::size_t oracle_cap = kDefaultOracleCap) {
  if (runs < 1) throw std::invalid_argument("crossover: runs must be positive");
  if (n > std::min(oracle_cap, kMaxOracleCap)) throw OracleLimitError(n, std::min(oracle_cap, kMaxOracleCap));
  detail::retain_heap_for_timing();
  std::vector<Automaton> batch;
  batch.reserve(runs);
  for (std::size_t i = 0; i < runs; ++i) batch.push_back(generate_uniform(n, 2, derive_seed(seed, i)));

  CheckOptions opts;
  opts.oracle_cap = oracle_cap;
  std::uint64_t agree = 0;
  for (int w = 0; w < kWarmupRuns; ++w) {
    agree += check_synchronizing(batch[w % runs], opts).synchronizing;
    agree += synch_slow(batch[w % runs], oracle_cap);
  }
  auto start = Clock::now();
  for (const auto& A : batch) agree += check_synchronizing(A, opts).synchronizing;
  const double main_total = detail::seconds_since(start);
  start = Clock::now();
  for (const auto& A : batch) agree += synch_slow(A, oracle_cap);
  const double quad_total = detail::seconds_since(start);
  detail::timing_sink = detail::timing_sink + agree;

  const auto r = static_cast<double>(runs);
  return {n, main_total / r, quad_total / r};
}

inline CrossoverReport crossover_scan(std::size_t n_min, std::size_t n_max, std::size_t runs_per_n,
                                      std::uint64_t seed, std::size_t step = 1,
                                      std::size_t oracle_cap = kDefaultOracleCap) {
  if (n_min < 1 || n_max < n_min) throw std::invalid_argument("crossover_scan: empty n range");
  if (step < 1) throw std::invalid_argument("crossover_scan: step must be positive");
  if (n_max > std::min(oracle_cap, kMaxOracleCap)) throw OracleLimitError(n_max, std::min(oracle_cap, kMaxOracleCap));
  CrossoverReport rep;
  for (std::size_t n = n_min; n <= n_max; n += step) {
    rep.rows.push_back(time_crossover_point(n, runs_per_n, derive_seed(seed, n), oracle_cap));
    if (!rep.n0 && rep.rows.back().mean_main < rep.rows.back().mean_quadratic) rep.n0 = n;
  }
  return rep;
}

// ---------------------------------------------------------------------------
// CSV output. Floats carry 6 significant digits.

inline std::string format_float(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

// Reason columns in a fixed order: the guards of the binary check, then the
// Step-1 negatives.
inline std::vector<FailReason> fn_reason_columns() {
  std::vector<FailReason> cols;
  for (auto r : kAllFailReasons) {
    if (r != FailReason::NoLetterPair && r != FailReason::RestrictionNotSynchronizing) cols.push_back(r);
  }
  return cols;
}

inline void write_fn_header(std::ostream& os) {
  os << "n,total_runs,failures,estimate";
  for (auto r : fn_reason_columns()) os << ",reason:" << to_string(r);
  os << ",reason:" << kNotSynchronizingColumn << ",seed\n";
}

inline void write_fn_row(std::ostream& os, const FnReport& rep) {
  os << rep.n << ',' << rep.total_runs << ',' << rep.failure_count << ',' << format_float(rep.estimate);
  for (auto r : fn_reason_columns()) {
    const auto it = rep.reasons.find(r);
    os << ',' << (it == rep.reasons.end() ? 0 : it->second);
  }
  os << ',' << rep.not_synchronizing << ',' << rep.seed << '\n';
}

inline void write_timing_csv(std::ostream& os, const std::vector<TimingRow>& rows) {
  os << "n,k,reps,mean_seconds\n";
  for (const auto& r : rows) os << r.n << ',' << r.k << ',' << r.reps << ',' << format_float(r.mean_seconds) << '\n';
}

inline void write_crossover_csv(std::ostream& os, const CrossoverReport& rep) {
  os << "n,mean_main,mean_quadratic\n";
  for (const auto& r : rep.rows) {
    os << r.n << ',' << format_float(r.mean_main) << ',' << format_float(r.mean_quadratic) << '\n';
  }
}

inline void write_main_time_csv(std::ostream& os, const std::vector<MainTimeEstimate>& rows) {
  os << "n,fn,t_lin,t_quad,estimate\n";
  for (const auto& r : rows) {
    os << r.n << ',' << format_float(r.fn) << ',' << format_float(r.t_lin) << ',' << format_float(r.t_quad) << ','
       << format_float(r.estimate) << '\n';
  }
}

}  // namespace linsync
