#include <cmath>
#include <cstdint>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include <linsync/check.hpp>
#include <linsync/clusters.hpp>
#include <linsync/experiments.hpp>
#include <linsync/lincheck.hpp>
#include <linsync/pairgraph.hpp>
#include <linsync/rng.hpp>
#include <linsync/scc.hpp>

#include "fixtures.hpp"

using namespace linsync;

namespace {

int failures = 0;

void report(int id, const char* name, bool ok, const std::string& detail) {
  std::printf("%s criterion %d (%s): %s\n", ok ? "PASS" : "FAIL", id, name, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

void exhaustive_small() {
  std::uint64_t count = 0, bad = 0;
  for (std::size_t n = 1; n <= 3; ++n) {
    fixtures::for_each_automaton(n, 2, [&](const Automaton& A) {
      ++count;
      const bool fast = check_synchronizing(A).synchronizing;
      const bool slow = synch_slow(A);
      const bool brute = fixtures::brute_force_synchronizing(A);
      bad += fast != slow || slow != brute;
    });
  }
  report(1, "exhaustive oracle equivalence", bad == 0,
         std::to_string(count) + " automata, " + std::to_string(bad) + " disagreements");
}

void randomized() {
  constexpr std::uint64_t kPerCell = 100000;
  std::uint64_t bad = 0, unsound = 0, cell = 0;
  for (std::size_t n = 4; n <= 10; ++n) {
    for (std::size_t k : {1u, 2u, 3u, 5u}) {
      const auto cell_seed = derive_seed(2024, cell++);
      for (std::uint64_t i = 0; i < kPerCell; ++i) {
        const auto A = generate_uniform(n, k, derive_seed(cell_seed, i));
        const bool slow = synch_slow(A);
        bad += check_synchronizing(A).synchronizing != slow;
        if (k >= 2) {
          const auto B = k == 2 ? A : restrict_letters(A, 0, 1);
          if (binary_linear_check(B).verdict == Verdict::Synchronizing) unsound += !synch_slow(B);
        }
      }
    }
  }
  report(2, "randomized oracle equivalence", bad == 0 && unsound == 0,
         std::to_string(cell * kPerCell) + " automata, " + std::to_string(bad) + " disagreements, " +
             std::to_string(unsound) + " unsound linear verdicts");
}

void fn_reproduction() {
  const std::vector<std::pair<std::size_t, double>> table{{5, 3.57}, {10, 4.6}, {20, 4.8}, {50, 4.33}, {100, 3.79}};
  bool ok = true;
  std::string detail;
  for (const auto& [n, expected] : table) {
    const auto plan = required_trials(n, 1.0, 0.99).with_multiplier(3 * n);
    const auto rep = estimate_fn(n, plan, 7);
    const bool row_ok = std::abs(rep.estimate - expected) <= 1.5 && rep.estimate <= 6.0;
    ok = ok && row_ok;
    detail += "n=" + std::to_string(n) + " runs=" + std::to_string(rep.total_runs) +
              fmt(" f=%.3f (target %.2f)", rep.estimate, expected) + (row_ok ? "; " : " out of range; ");
  }
  report(3, "f_n reproduction", ok, detail);
}

void linear_scaling() {
  constexpr std::size_t kReps = 200;
  const auto rows = bench_linear({10000, 100000}, {2}, kReps, 11);
  const double ratio = rows[1].mean_seconds / rows[0].mean_seconds;
  report(4, "linear scaling", ratio >= 8.0 && ratio <= 13.0,
         fmt("mean %.3g s at n=1e4, %.3g s at n=1e5, ratio %.2f", rows[0].mean_seconds, rows[1].mean_seconds, ratio));
}

void crossover() {
  const auto row = time_crossover_point(50, 10000, 13);
  report(5, "crossover by n=50", row.mean_main < row.mean_quadratic,
         fmt("main %.3g s, quadratic %.3g s per automaton", row.mean_main, row.mean_quadratic));
}

void trial_arithmetic() {
  bool ok = required_trials(10, 0.1, 0.99).t == 2650;
  std::uint64_t checked = 0, bad = 0;
  for (std::size_t n : {1u, 5u, 10u, 50u, 100u}) {
    for (double eps : {0.05, 0.1, 0.5, 1.0, 2.0}) {
      for (double p0 : {0.5, 0.9, 0.95, 0.99}) {
        const auto plan = required_trials(n, eps, p0);
        const double bound = -(static_cast<double>(n) / (2.0 * eps * eps)) * std::log((1.0 - p0) / 2.0);
        bad += !(static_cast<double>(plan.t) >= bound && static_cast<double>(plan.t - 1) < bound);
        ++checked;
      }
    }
  }
  ok = ok && bad == 0;
  report(6, "trial count arithmetic", ok,
         "t(10, 0.1, 0.99) = " + std::to_string(required_trials(10, 0.1, 0.99).t) + ", " + std::to_string(checked) +
             " triples, " + std::to_string(bad) + " not minimal");
}

bool cluster_invariants_hold(const Automaton& A, const ClusterStructure& cs) {
  const std::size_t n = A.states();
  const Letter a = cs.letter;
  std::size_t total = 0;
  for (auto s : cs.size) total += s;
  if (total != n) return false;
  std::vector<std::uint32_t> members(cs.cluster_count(), 0);
  for (State q = 0; q < n; ++q) ++members[cs.cluster[q]];
  for (std::uint32_t c = 0; c < cs.cluster_count(); ++c) {
    if (members[c] != cs.size[c]) return false;
    const auto cyc = cs.cycle(c);
    if (cyc.empty()) return false;
    for (std::size_t i = 0; i < cyc.size(); ++i) {
      if (A(cyc[i], a) != cyc[(i + 1) % cyc.size()] || cs.cluster[cyc[i]] != c || cs.height[cyc[i]] != 0) return false;
    }
  }
  for (State q = 0; q < n; ++q) {
    if (cs.cluster[A(q, a)] != cs.cluster[q]) return false;
    if (cs.height[q] == 0) continue;
    if (cs.height[A(q, a)] + 1 != cs.height[q]) return false;
  }
  return true;
}

void property_suite() {
  std::uint64_t cluster_bad = 0, z_pairs = 0, z_bad = 0, tree_edges = 0, tree_bad = 0;
  for (std::uint64_t s = 0; s < 20000; ++s) {
    const std::size_t n = 2 + s % 11;
    const auto A = generate_uniform(n, 2, derive_seed(17, s));
    const auto cs0 = build_cluster_structure(A, 0), cs1 = build_cluster_structure(A, 1);
    cluster_bad += !cluster_invariants_hold(A, cs0) + !cluster_invariants_hold(A, cs1);

    const auto scc = analyze_scc(A);
    if (!scc.has_q0()) continue;
    const auto info = find_tallest_branch(cs0, cs1);
    if (!info) continue;
    const auto& cs_a1 = info->a1 == 0 ? cs0 : cs1;
    const auto& cs_a2 = info->a1 == 0 ? cs1 : cs0;
    const auto seed = stable_seed(*info, scc, cs_a1);
    if (!seed) continue;
    const auto Z = multiply_stable_pairs(A, *seed, info->a1, info->a2, n);
    if (!Z) continue;
    const auto M = mergeable_pairs(A);
    for (const auto* set : {&Z->z_a1, &Z->z_a2}) {
      for (auto [x, y] : set->pairs) {
        ++z_pairs;
        z_bad += !M.contains(x, y);
      }
    }
    for (const auto& [cs, z] : {std::pair{&cs_a1, &Z->z_a1}, std::pair{&cs_a2, &Z->z_a2}}) {
      const auto g = build_cluster_graph(*cs, *z, n);
      if (!g.connected || g.d <= 1) continue;
      for (const auto& e : g.edges) {
        if (!e.tree) continue;
        ++tree_edges;
        tree_bad += !congruence_holds(g, *cs, e.p, e.q);
      }
    }
  }

  std::uint64_t shift_cases = 0, shift_bad = 0;
  std::mt19937_64 rng(19);
  for (std::uint32_t d = 1; d <= 12; ++d) {
    const std::uint32_t full = (1u << d) - 1;
    const bool exhaustive = d <= 6;
    const std::uint64_t cases = exhaustive ? std::uint64_t{1} << (2 * d) : 200000;
    std::vector<std::uint32_t> I, J;
    for (std::uint64_t c = 0; c < cases; ++c) {
      const std::uint32_t im = exhaustive ? static_cast<std::uint32_t>(c >> d) : static_cast<std::uint32_t>(rng()) & full;
      const std::uint32_t jm = exhaustive ? static_cast<std::uint32_t>(c) & full : static_cast<std::uint32_t>(rng()) & full;
      I.clear();
      J.clear();
      for (std::uint32_t r = 0; r < d; ++r) {
        if (im >> r & 1) I.push_back(r);
        if (jm >> r & 1) J.push_back(r);
      }
      bool expected = false;
      for (std::uint32_t z = 0; z < d && !expected; ++z) {
        std::uint32_t cover = jm;
        for (auto i : I) cover |= 1u << ((z + i) % d);
        expected = cover == full;
      }
      ++shift_cases;
      shift_bad += shift_exists(I, J, d) != expected;
    }
  }

  const bool ok = cluster_bad == 0 && z_bad == 0 && tree_bad == 0 && shift_bad == 0 && z_pairs > 0 && tree_edges > 0;
  report(7, "property suite", ok,
         "cluster violations " + std::to_string(cluster_bad) + ", Z pairs " + std::to_string(z_pairs) + " (" +
             std::to_string(z_bad) + " not mergeable), tree edges " + std::to_string(tree_edges) + " (" +
             std::to_string(tree_bad) + " incongruent), shift cases " + std::to_string(shift_cases) + " (" +
             std::to_string(shift_bad) + " wrong)");
}

}  // namespace

int main() {
  exhaustive_small();
  randomized();
  fn_reproduction();
  linear_scaling();
  crossover();
  trial_arithmetic();
  property_suite();
  return failures == 0 ? 0 : 1;
}
