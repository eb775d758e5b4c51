#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <linsync/automaton.hpp>
#include <linsync/check.hpp>
#include <linsync/experiments.hpp>
#include <linsync/io.hpp>
#include <linsync/pairgraph.hpp>

namespace {

using namespace linsync;

constexpr int kExitSync = 0;
constexpr int kExitNotSync = 1;
constexpr int kExitUsage = 2;
constexpr int kExitIndeterminate = 3;

constexpr const char* kCapEnv = "LINSYNC_ORACLE_CAP";

class UsageError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

std::size_t default_oracle_cap() {
  const char* env = std::getenv(kCapEnv);
  if (!env || !*env) return kDefaultOracleCap;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(env, &end, 10);
  if (*end != '\0' || v == 0) throw UsageError(std::string(kCapEnv) + " must be a positive integer");
  return static_cast<std::size_t>(v);
}

void validate_cap(std::size_t cap) {
  if (cap == 0 || cap > kMaxOracleCap) {
    throw UsageError("oracle cap must lie in [1, " + std::to_string(kMaxOracleCap) + "]");
  }
}

std::string read_input(const std::string& path) {
  if (path == "-") return {std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>()};
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Writes to --out when given, stdout otherwise.
void emit(const std::string& out_path, const std::string& text) {
  if (out_path.empty()) {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + out_path);
  out << text;
  if (!out) throw std::runtime_error("cannot write " + out_path);
}

// ---------------------------------------------------------------------------

struct CheckConfig {
  std::string input;
  std::size_t gen_n = 0;
  std::size_t gen_k = 2;
  std::uint64_t seed = 0;
  std::string method = "auto";
  std::string format = "text";
  bool no_pretest = false;
  std::size_t oracle_cap = 0;
};

struct CheckReport {
  std::string verdict;
  std::string method;
  std::optional<FailReason> reason;
  std::string step;
  int exit_code = kExitSync;
};

CheckReport run_check(const Automaton& A, const CheckConfig& cfg) {
  CheckOptions opts;
  opts.full_alphabet_pretest = !cfg.no_pretest;
  opts.oracle_cap = cfg.oracle_cap;
  CheckReport rep;
  if (cfg.method == "quadratic") {
    const bool sync = synch_slow(A, opts.oracle_cap);
    rep.verdict = std::string(to_string(sync ? Verdict::Synchronizing : Verdict::NotSynchronizing));
    rep.method = std::string(to_string(Method::Quadratic));
    rep.exit_code = sync ? kExitSync : kExitNotSync;
    return rep;
  }
  if (cfg.method == "linear-only") {
    const auto lin = linear_part(A, opts);
    rep.verdict = std::string(to_string(lin.outcome.verdict));
    rep.method = std::string(to_string(Method::Linear));
    rep.reason = lin.outcome.reason;
    rep.step = std::string(lin.outcome.step);
    rep.exit_code = lin.outcome.verdict == Verdict::Synchronizing      ? kExitSync
                    : lin.outcome.verdict == Verdict::NotSynchronizing ? kExitNotSync
                                                                       : kExitIndeterminate;
    return rep;
  }
  const auto res = check_synchronizing(A, opts);
  rep.verdict = std::string(to_string(res.synchronizing ? Verdict::Synchronizing : Verdict::NotSynchronizing));
  rep.method = std::string(to_string(res.method));
  rep.reason = res.linear.outcome.reason;
  rep.step = std::string(res.linear.outcome.step);
  rep.exit_code = res.synchronizing ? kExitSync : kExitNotSync;
  return rep;
}

std::string format_check(const CheckReport& rep, const std::string& format) {
  if (format == "json") {
    nlohmann::ordered_json j;
    j["verdict"] = rep.verdict;
    j["method"] = rep.method;
    j["fail_reason"] = rep.reason ? nlohmann::ordered_json(std::string(to_string(*rep.reason))) : nullptr;
    j["step"] = rep.step.empty() ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(rep.step);
    return j.dump() + '\n';
  }
  std::ostringstream os;
  if (rep.exit_code == kExitIndeterminate) os << "fail: " << to_string(*rep.reason) << '\n';
  else os << rep.verdict << '\n';
  os << "method: " << rep.method << '\n';
  if (rep.reason && rep.exit_code != kExitIndeterminate) os << "fail_reason: " << to_string(*rep.reason) << '\n';
  return os.str();
}

int cmd_check(const CheckConfig& cfg) {
  if (cfg.input.empty() == (cfg.gen_n == 0)) throw UsageError("check needs exactly one of FILE or --gen-n");
  if (cfg.gen_n != 0 && cfg.gen_k == 0) throw UsageError("--gen-k must be positive");
  validate_cap(cfg.oracle_cap);
  const Automaton A = cfg.input.empty() ? generate_uniform(cfg.gen_n, cfg.gen_k, cfg.seed) : parse(read_input(cfg.input));

  const auto start = std::chrono::steady_clock::now();
  const auto rep = run_check(A, cfg);
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::cout << format_check(rep, cfg.format);
  std::cout.flush();
  // Timing goes to stderr so stdout is identical across identical runs.
  std::fprintf(stderr, "elapsed: %s s\n", format_float(elapsed).c_str());
  return rep.exit_code;
}

// ---------------------------------------------------------------------------

struct GenConfig {
  std::size_t n = 0;
  std::size_t k = 2;
  std::uint64_t seed = 0;
  std::string format = "text";
  std::string out;
};

int cmd_gen(const GenConfig& cfg) {
  if (cfg.n == 0 || cfg.k == 0) throw UsageError("gen needs n >= 1 and k >= 1");
  const auto A = generate_uniform(cfg.n, cfg.k, cfg.seed);
  emit(cfg.out, cfg.format == "json" ? serialize_json(A) : serialize(A));
  return 0;
}

// ---------------------------------------------------------------------------

struct FnConfig {
  std::vector<std::size_t> ns;
  double eps = 1.0;
  double p0 = 0.99;
  std::uint64_t t = 0;
  std::uint64_t seed = 1;
  unsigned threads = 1;
  std::string out;
};

int cmd_estimate_fn(const FnConfig& cfg) {
  std::ostringstream os;
  write_fn_header(os);
  for (auto n : cfg.ns) {
    if (n < 2) throw UsageError("estimate-fn needs n >= 2");
    auto plan = required_trials(n, cfg.eps, cfg.p0);
    if (cfg.t > plan.t) plan = plan.with_multiplier(cfg.t);
    write_fn_row(os, estimate_fn(n, plan, cfg.seed, cfg.threads));
  }
  emit(cfg.out, os.str());
  return 0;
}

struct BenchConfig {
  std::vector<std::size_t> ns;
  std::vector<std::size_t> ks{2};
  std::size_t reps = 100;
  std::uint64_t seed = 1;
  bool no_pretest = false;
  std::string out;
};

int cmd_bench(const BenchConfig& cfg) {
  for (auto n : cfg.ns) {
    if (n == 0) throw UsageError("bench needs n >= 1");
  }
  for (auto k : cfg.ks) {
    if (k == 0) throw UsageError("bench needs k >= 1");
  }
  if (cfg.reps == 0) throw UsageError("--reps must be positive");
  CheckOptions opts;
  opts.full_alphabet_pretest = !cfg.no_pretest;
  std::ostringstream os;
  write_timing_csv(os, bench_linear(cfg.ns, cfg.ks, cfg.reps, cfg.seed, opts));
  emit(cfg.out, os.str());
  return 0;
}

struct MainTimeConfig {
  std::vector<std::size_t> ns;
  double fn = 6.0;
  std::size_t quad_runs = kDefaultQuadRuns;
  std::uint64_t seed = 1;
  std::size_t oracle_cap = 0;
  std::string out;
};

int cmd_main_time(const MainTimeConfig& cfg) {
  validate_cap(cfg.oracle_cap);
  if (cfg.fn < 0.0) throw UsageError("--fn must be non-negative");
  if (cfg.quad_runs == 0) throw UsageError("--quad-runs must be positive");
  std::vector<MainTimeEstimate> rows;
  for (auto n : cfg.ns) {
    if (n == 0) throw UsageError("main-time needs n >= 1");
    if (n > cfg.oracle_cap) throw UsageError(OracleLimitError(n, cfg.oracle_cap).what());
    rows.push_back(estimate_main_time(n, cfg.fn, derive_seed(cfg.seed, n), cfg.quad_runs, cfg.oracle_cap));
  }
  std::ostringstream os;
  write_main_time_csv(os, rows);
  emit(cfg.out, os.str());
  return 0;
}

struct CrossoverConfig {
  std::size_t min = 5;
  std::size_t max = 50;
  std::size_t step = 1;
  std::size_t runs = 1000;
  std::uint64_t seed = 1;
  std::size_t oracle_cap = 0;
  std::string out;
};

int cmd_crossover(const CrossoverConfig& cfg) {
  validate_cap(cfg.oracle_cap);
  if (cfg.min == 0 || cfg.max < cfg.min) throw UsageError("crossover needs 1 <= --min <= --max");
  if (cfg.step == 0 || cfg.runs == 0) throw UsageError("--step and --runs must be positive");
  if (cfg.max > cfg.oracle_cap) throw UsageError(OracleLimitError(cfg.max, cfg.oracle_cap).what());
  const auto rep = crossover_scan(cfg.min, cfg.max, cfg.runs, cfg.seed, cfg.step, cfg.oracle_cap);
  std::ostringstream os;
  write_crossover_csv(os, rep);
  emit(cfg.out, os.str());
  // The CSV stays machine-readable; the summary line goes to stderr.
  if (rep.n0) std::fprintf(stderr, "n0: %zu\n", *rep.n0);
  else std::fprintf(stderr, "n0: none\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Decide whether a finite automaton is synchronizing, and run the timing and f_n experiments."};
  app.require_subcommand(1, 1);

  std::size_t env_cap = kDefaultOracleCap;
  try {
    env_cap = default_oracle_cap();
  } catch (const UsageError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  }

  CheckConfig check;
  check.oracle_cap = env_cap;
  auto* sc = app.add_subcommand("check", "Decide synchronization of an automaton file or a generated automaton");
  sc->add_option("file", check.input, "Automaton file (text or JSON), '-' for stdin");
  auto* gen_n = sc->add_option("--gen-n", check.gen_n, "Generate a uniform random automaton with this many states");
  sc->add_option("--gen-k", check.gen_k, "Alphabet size of the generated automaton")->needs(gen_n);
  sc->add_option("--seed", check.seed, "Seed of the generated automaton")->needs(gen_n);
  sc->add_option("--method", check.method, "auto, linear-only or quadratic")
      ->check(CLI::IsMember({"auto", "linear-only", "quadratic"}));
  sc->add_option("--format", check.format, "text or json")->check(CLI::IsMember({"text", "json"}));
  sc->add_flag("--no-pretest", check.no_pretest, "Skip the full-alphabet sink-component pretest");
  sc->add_option("--oracle-cap", check.oracle_cap, "Largest state count for the pair-graph oracle");

  GenConfig gen;
  auto* sg = app.add_subcommand("gen", "Write a uniform random automaton");
  sg->add_option("-n", gen.n, "Number of states")->required();
  sg->add_option("-k", gen.k, "Number of letters");
  sg->add_option("--seed", gen.seed, "Random seed");
  sg->add_option("--format", gen.format, "text or json")->check(CLI::IsMember({"text", "json"}));
  sg->add_option("--out", gen.out, "Output file (default stdout)");

  FnConfig fn;
  auto* sf = app.add_subcommand("estimate-fn", "Estimate f_n over random binary automata (CSV)");
  sf->add_option("-n,--ns", fn.ns, "State counts")->required()->delimiter(',');
  sf->add_option("--eps", fn.eps, "Accuracy target epsilon");
  sf->add_option("--p0", fn.p0, "Confidence p0");
  sf->add_option("--t", fn.t, "Raise the per-state trial multiplier to at least this value");
  sf->add_option("--seed", fn.seed, "Master seed");
  sf->add_option("--threads", fn.threads, "Worker threads")->check(CLI::PositiveNumber);
  sf->add_option("--out", fn.out, "Output file (default stdout)");

  BenchConfig bench;
  auto* sb = app.add_subcommand("bench", "Mean time of the linear part (CSV)");
  sb->add_option("--ns", bench.ns, "State counts")->required()->delimiter(',');
  sb->add_option("--ks", bench.ks, "Alphabet sizes")->delimiter(',');
  sb->add_option("--reps", bench.reps, "Timed runs per cell");
  sb->add_option("--seed", bench.seed, "Master seed");
  sb->add_flag("--no-pretest", bench.no_pretest, "Skip the full-alphabet sink-component pretest");
  sb->add_option("--out", bench.out, "Output file (default stdout)");

  MainTimeConfig mt;
  mt.oracle_cap = env_cap;
  auto* sm = app.add_subcommand("main-time", "Estimated mean time of the main algorithm (CSV)");
  sm->add_option("--ns", mt.ns, "State counts")->required()->delimiter(',');
  sm->add_option("--fn", mt.fn, "Assumed f_n");
  sm->add_option("--quad-runs", mt.quad_runs, "Oracle runs averaged for t_quad");
  sm->add_option("--seed", mt.seed, "Master seed");
  sm->add_option("--oracle-cap", mt.oracle_cap, "Largest state count for the pair-graph oracle");
  sm->add_option("--out", mt.out, "Output file (default stdout)");

  CrossoverConfig cx;
  cx.oracle_cap = env_cap;
  auto* sx = app.add_subcommand("crossover", "Main algorithm against the quadratic oracle (CSV, n0 on stderr)");
  sx->add_option("--min", cx.min, "Smallest n");
  sx->add_option("--max", cx.max, "Largest n");
  sx->add_option("--step", cx.step, "Step between state counts");
  sx->add_option("--runs", cx.runs, "Automata per n");
  sx->add_option("--seed", cx.seed, "Master seed");
  sx->add_option("--oracle-cap", cx.oracle_cap, "Largest state count for the pair-graph oracle");
  sx->add_option("--out", cx.out, "Output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (sc->parsed()) return cmd_check(check);
    if (sg->parsed()) return cmd_gen(gen);
    if (sf->parsed()) return cmd_estimate_fn(fn);
    if (sb->parsed()) return cmd_bench(bench);
    if (sm->parsed()) return cmd_main_time(mt);
    if (sx->parsed()) return cmd_crossover(cx);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  }
  return kExitUsage;
}
