#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <unordered_set>
#include <utility>
#include <vector>

#include "automaton.hpp"
#include "clusters.hpp"
#include "outcome.hpp"
#include "scc.hpp"

namespace linsync {

using StatePair = std::pair<State, State>;
using StateMask = std::span<const std::uint8_t>;

// ceil(n^0.4), exactly: the least m with m^5 >= n^2.
inline std::uint32_t pair_multiplier(std::size_t n) {
  using u128 = unsigned __int128;
  auto m = static_cast<std::uint64_t>(std::ceil(std::pow(static_cast<double>(n), 0.4)));
  const u128 target = u128{n} * n;
  auto fifth = [](std::uint64_t x) { return u128{x} * x * x * x * x; };
  while (m > 0 && fifth(m - 1) >= target) --m;
  while (fifth(m) < target) ++m;
  return static_cast<std::uint32_t>(m);
}

// ---------------------------------------------------------------------------
// Tallest 1-branch and the seed stable pair.

struct TallestBranchInfo {
  Letter a1 = 0;
  Letter a2 = 1;
  State root = kNoState;        // r: height-1 root of the tallest 1-branch T
  State cycle_pred = kNoState;  // p: cycle state with p.a1 == r.a1
  std::uint32_t height = 0;          // height of T
  std::uint32_t second_height = 0;   // tallest other 1-branch, 0 if none

  bool contains(const ClusterStructure& cs_a1, State q) const noexcept { return cs_a1.branch[q] == root; }
};

namespace detail {

struct BranchSummary {
  State root = kNoState;
  std::uint32_t height = 0;
  std::uint32_t second = 0;
};

inline std::optional<BranchSummary> unique_tallest_branch(const ClusterStructure& cs) {
  const std::size_t n = cs.states();
  std::vector<std::uint32_t> branch_height(n, 0);
  for (State q = 0; q < n; ++q) {
    if (cs.height[q] >= 1) {
      auto& h = branch_height[cs.branch[q]];
      if (cs.height[q] > h) h = cs.height[q];
    }
  }
  BranchSummary best;
  for (State q = 0; q < n; ++q) {
    if (cs.height[q] != 1) continue;
    const auto h = branch_height[q];
    if (best.root == kNoState || h > best.height) {
      best.second = best.root == kNoState ? 0 : best.height;
      best.height = h;
      best.root = q;
    } else if (h > best.second) {
      best.second = h;
    }
  }
  if (best.root == kNoState || best.second >= best.height) return std::nullopt;
  return best;
}

}  // namespace detail

// Tallest 1-branch of UG(a1) when it is strictly unique; a2 is the other letter.
inline std::optional<TallestBranchInfo> tallest_branch(const ClusterStructure& cs, Letter a2) {
  const auto summary = detail::unique_tallest_branch(cs);
  if (!summary) return std::nullopt;
  TallestBranchInfo info;
  info.a1 = cs.letter;
  info.a2 = a2;
  info.root = summary->root;
  info.height = summary->height;
  info.second_height = summary->second;
  const State target = cs.tree[info.root];  // r.a1, a cycle state
  const auto cycle = cs.cycle(cs.cluster[target]);
  info.cycle_pred = cycle[(cs.cycle_pos[target] + cycle.size() - 1) % cycle.size()];
  return info;
}

// Picks the first of the two letters whose functional graph has a strictly
// unique tallest 1-branch. `first` should be the lower-indexed letter.
inline std::optional<TallestBranchInfo> find_tallest_branch(const ClusterStructure& first,
                                                            const ClusterStructure& second) {
  if (auto info = tallest_branch(first, second.letter)) return info;
  return tallest_branch(second, first.letter);
}

// {p, r} when T reaches into Q0 above every other 1-branch.
inline std::optional<StatePair> stable_seed(const TallestBranchInfo& info, const SccAnalysis& scc,
                                            const ClusterStructure& cs_a1) {
  for (State q : scc.q0()) {
    if (info.contains(cs_a1, q) && cs_a1.height[q] > info.second_height) {
      return StatePair{info.cycle_pred, info.root};
    }
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Multiplying the seed pair.

// Z(a): stable pairs used as edges between clusters of UG(a). Unordered pairs
// of distinct states, without repeats, in the order they were produced.
struct StablePairSet {
  Letter letter = 0;
  std::vector<StatePair> pairs;

  std::size_t size() const noexcept { return pairs.size(); }
};

namespace detail {

class PairCollector {
public:
  explicit PairCollector(Letter letter) { set_.letter = letter; }

  void add(State x, State y) {
    if (x == y) return;
    if (x > y) std::swap(x, y);
    const std::uint64_t key = (std::uint64_t{x} << 32) | y;
    if (set_.pairs.size() < kLinearScan) {
      for (const auto& [u, v] : set_.pairs) {
        if (u == x && v == y) return;
      }
      set_.pairs.emplace_back(x, y);
      if (set_.pairs.size() == kLinearScan) {
        for (const auto& [u, v] : set_.pairs) seen_.insert((std::uint64_t{u} << 32) | v);
      }
      return;
    }
    if (seen_.insert(key).second) set_.pairs.emplace_back(x, y);
  }

  StablePairSet take() && { return std::move(set_); }
  std::size_t size() const noexcept { return set_.pairs.size(); }
  const std::vector<StatePair>& pairs() const noexcept { return set_.pairs; }

private:
  static constexpr std::size_t kLinearScan = 48;
  StablePairSet set_;
  std::unordered_set<std::uint64_t> seen_;
};

// Adds {x.b^j, y.b^j} for j = 1..m; stops once the entries meet, since they
// stay equal from then on.
inline void add_powers(const Automaton& A, State x, State y, Letter b, std::uint32_t m, PairCollector& out) {
  for (std::uint32_t j = 1; j <= m; ++j) {
    x = A(x, b);
    y = A(y, b);
    if (x == y) return;
    out.add(x, y);
  }
}

}  // namespace detail

struct StablePairs {
  StablePairSet z_a2;  // pairs {p_i.a1^j, r_i.a1^j}
  StablePairSet z_a1;  // first six of z_a2 pushed by a2^j
};

inline constexpr std::uint32_t kSeedPowers = 6;

// Builds Z(a2) from {p_i, r_i} = {p.a2^i, r.a2^i}, i = 1..6, each pushed by
// a1^j for j = 1..ceil(n^0.4); then Z(a1) from the first six pairs of Z(a2)
// pushed by a2^j. Fails when Z(a2) has fewer than six pairs.
inline std::optional<StablePairs> multiply_stable_pairs(const Automaton& A, StatePair seed, Letter a1, Letter a2,
                                                        std::size_t n) {
  const std::uint32_t m = pair_multiplier(n);
  detail::PairCollector z2(a2);
  auto [p, r] = seed;
  for (std::uint32_t i = 1; i <= kSeedPowers; ++i) {
    p = A(p, a2);
    r = A(r, a2);
    if (p == r) break;
    detail::add_powers(A, p, r, a1, m, z2);
  }
  if (z2.size() < kSeedPowers) return std::nullopt;

  detail::PairCollector z1(a1);
  for (std::size_t i = 0; i < kSeedPowers; ++i) {
    const auto [x, y] = z2.pairs()[i];
    detail::add_powers(A, x, y, a2, m, z1);
  }
  return StablePairs{std::move(z2).take(), std::move(z1).take()};
}

// ---------------------------------------------------------------------------
// The graph on large clusters.

inline constexpr std::uint32_t kNoIndex = 0xFFFFFFFFu;

struct ClusterGraph {
  struct Edge {
    std::uint32_t u = 0, v = 0;  // vertex indices; p lies in u, q in v
    State p = 0, q = 0;          // generating stable pair
    bool tree = false;
  };

  Letter letter = 0;
  std::vector<std::uint32_t> vertices;   // cluster ids of L_a
  std::vector<std::uint32_t> vertex_of;  // per cluster: index into vertices, or kNoIndex
  std::vector<Edge> edges;
  std::vector<std::uint32_t> parent_edge;  // per vertex, kNoIndex at the root and off the tree
  bool connected = false;
  std::uint32_t d = 0;                 // gcd of cycle lengths over L_a
  std::vector<std::uint32_t> label;    // per vertex, residue mod d

  bool is_large_state(const ClusterStructure& cs, State q) const noexcept {
    return vertex_of[cs.cluster[q]] != kNoIndex;
  }
};

namespace detail {

inline std::int64_t mod(std::int64_t x, std::int64_t d) {
  const auto r = x % d;
  return r < 0 ? r + d : r;
}

}  // namespace detail

// Vertices: clusters larger than n^0.45. Edges: pairs of Z with both entries
// in large clusters. A BFS from the first vertex gives the spanning tree, and
// when the graph is connected the labels are propagated along it so that
// label(c') - label(c) == phase(q) - phase(p) (mod d) on every tree edge,
// with phase = steps_to_base.
inline ClusterGraph build_cluster_graph(const ClusterStructure& cs, const StablePairSet& Z, std::size_t n) {
  ClusterGraph g;
  g.letter = cs.letter;
  g.vertex_of.assign(cs.cluster_count(), kNoIndex);
  const double threshold = large_cluster_threshold(n);
  for (std::uint32_t c = 0; c < cs.cluster_count(); ++c) {
    if (static_cast<double>(cs.size[c]) > threshold) {
      g.vertex_of[c] = static_cast<std::uint32_t>(g.vertices.size());
      g.vertices.push_back(c);
    }
  }
  const std::size_t V = g.vertices.size();
  g.parent_edge.assign(V, kNoIndex);
  g.label.assign(V, 0);
  if (V == 0) return g;

  for (const auto& [x, y] : Z.pairs) {
    const auto u = g.vertex_of[cs.cluster[x]], v = g.vertex_of[cs.cluster[y]];
    if (u == kNoIndex || v == kNoIndex) continue;
    g.edges.push_back({u, v, x, y, false});
  }

  std::vector<std::uint32_t> deg_start(V + 1, 0);
  for (const auto& e : g.edges) {
    ++deg_start[e.u + 1];
    if (e.v != e.u) ++deg_start[e.v + 1];
  }
  for (std::size_t i = 0; i < V; ++i) deg_start[i + 1] += deg_start[i];
  std::vector<std::uint32_t> incident(deg_start[V]);
  {
    std::vector<std::uint32_t> fill(deg_start.begin(), deg_start.end() - 1);
    for (std::uint32_t i = 0; i < g.edges.size(); ++i) {
      incident[fill[g.edges[i].u]++] = i;
      if (g.edges[i].v != g.edges[i].u) incident[fill[g.edges[i].v]++] = i;
    }
  }

  std::vector<std::uint8_t> seen(V, 0);
  std::vector<std::uint32_t> order{0};
  order.reserve(V);
  seen[0] = 1;
  for (std::size_t head = 0; head < order.size(); ++head) {
    const auto u = order[head];
    for (std::uint32_t k = deg_start[u]; k < deg_start[u + 1]; ++k) {
      auto& e = g.edges[incident[k]];
      const auto w = e.u == u ? e.v : e.u;
      if (seen[w]) continue;
      seen[w] = 1;
      e.tree = true;
      g.parent_edge[w] = incident[k];
      order.push_back(w);
    }
  }
  g.connected = order.size() == V;

  g.d = 0;
  for (auto c : g.vertices) g.d = std::gcd(g.d, static_cast<std::uint32_t>(cs.cycle_length(c)));
  if (!g.connected || g.d <= 1) return g;

  const auto d = static_cast<std::int64_t>(g.d);
  for (std::size_t i = 1; i < order.size(); ++i) {
    const auto w = order[i];
    const auto& e = g.edges[g.parent_edge[w]];
    // Orient the pair as (state in parent, state in child).
    const State in_parent = e.v == w ? e.p : e.q;
    const State in_child = e.v == w ? e.q : e.p;
    const auto parent = e.v == w ? e.u : e.v;
    const std::int64_t diff = static_cast<std::int64_t>(cs.steps_to_base(in_child)) -
                              static_cast<std::int64_t>(cs.steps_to_base(in_parent));
    g.label[w] = static_cast<std::uint32_t>(detail::mod(std::int64_t{g.label[parent]} + diff, d));
  }
  return g;
}

// Residue of (label(cluster(s)) - label(cluster(t))) - (phase(s) - phase(t))
// mod d, where phase is steps_to_base. Zero iff the congruence holds.
inline std::uint32_t congruence_defect(const ClusterGraph& g, const ClusterStructure& cs, State s, State t) {
  const auto d = static_cast<std::int64_t>(g.d);
  const std::int64_t lhs = std::int64_t{g.label[g.vertex_of[cs.cluster[s]]]} - g.label[g.vertex_of[cs.cluster[t]]];
  const std::int64_t rhs =
      static_cast<std::int64_t>(cs.steps_to_base(s)) - static_cast<std::int64_t>(cs.steps_to_base(t));
  return static_cast<std::uint32_t>(detail::mod(lhs - rhs, d));
}

inline bool congruence_holds(const ClusterGraph& g, const ClusterStructure& cs, State s, State t) {
  return congruence_defect(g, cs, s, t) == 0;
}

// Passes when the graph is connected and either d == 1 or the defects of the
// non-tree edges (loops and parallel edges included) together with d have
// gcd 1. For prime d that is the same as some congruence failing.
inline std::optional<FailReason> check_cluster_graph(const ClusterStructure& cs, const StablePairSet& Z,
                                                     std::size_t n) {
  const auto g = build_cluster_graph(cs, Z, n);
  if (g.vertices.empty()) return FailReason::NoLargeClusters;
  if (!g.connected) return FailReason::ClusterGraphDisconnected;
  std::uint32_t classes = g.d;
  for (const auto& e : g.edges) {
    if (classes == 1) break;
    if (!e.tree) classes = std::gcd(classes, congruence_defect(g, cs, e.p, e.q));
  }
  if (classes == 1) return std::nullopt;
  return FailReason::CongruencesAllHold;
}

// ---------------------------------------------------------------------------
// Cycle conditions. Each takes the cycles of UG(a) and the large-cluster
// states of the other letter b.

// Every cycle longer than 2 has at least ceil(s/2) states in L_b-hat.
inline bool step7_cycle_majority(const ClusterStructure& cs_a, StateMask large_b) {
  for (std::uint32_t c = 0; c < cs_a.cluster_count(); ++c) {
    const auto cycle = cs_a.cycle(c);
    if (cycle.size() <= 2) continue;
    std::size_t inside = 0;
    for (State q : cycle) inside += large_b[q];
    if (inside < (cycle.size() + 1) / 2) return false;
  }
  return true;
}

// Two-cycles C of UG(a) not contained in L_b-hat must have C.b or C.b^2 a
// singleton, have C.b inside L_a-hat, or satisfy the union and inclusion
// conditions on C.b and C.b^2.
inline bool step7_two_cycles(const Automaton& A, const ClusterStructure& cs_a, Letter b, StateMask large_a,
                             StateMask large_b) {
  for (std::uint32_t c = 0; c < cs_a.cluster_count(); ++c) {
    const auto cycle = cs_a.cycle(c);
    if (cycle.size() != 2) continue;
    const State x = cycle[0], y = cycle[1];
    if (large_b[x] && large_b[y]) continue;
    const State bx = A(x, b), by = A(y, b);
    if (bx == by) continue;
    if (large_a[bx] && large_a[by]) continue;  // merged through the stable classes of L_a-hat
    const State bbx = A(bx, b), bby = A(by, b);
    if (bbx == bby) continue;
    // |C.b u C.b^2| with both sets of size two.
    std::size_t union_size = 2;
    if (bbx != bx && bbx != by) ++union_size;
    if (bby != bx && bby != by) ++union_size;
    const bool cb_inside = large_b[bx] && large_b[by];
    const bool cb2_inside = large_b[bbx] && large_b[bby];
    const bool ok = (union_size == 3 && cb_inside) || (union_size == 4 && (cb_inside || cb2_inside));
    if (!ok) return false;
  }
  return true;
}

// Per cycle C of UG(a): whether C lies inside / meets L_b-hat, and whether
// C.b lies inside / meets L_a-hat.
struct CycleClosureFlags {
  std::vector<std::uint8_t> in_large_b;
  std::vector<std::uint8_t> image_in_large_a;
  std::vector<std::uint8_t> meets_large_b;
  std::vector<std::uint8_t> image_meets_large_a;
};

inline CycleClosureFlags cycle_closure_flags(const Automaton& A, const ClusterStructure& cs_a, Letter b,
                                             StateMask large_a, StateMask large_b) {
  CycleClosureFlags flags;
  flags.in_large_b.assign(cs_a.cluster_count(), 1);
  flags.image_in_large_a.assign(cs_a.cluster_count(), 1);
  flags.meets_large_b.assign(cs_a.cluster_count(), 0);
  flags.image_meets_large_a.assign(cs_a.cluster_count(), 0);
  for (std::uint32_t c = 0; c < cs_a.cluster_count(); ++c) {
    for (State q : cs_a.cycle(c)) {
      if (large_b[q]) flags.meets_large_b[c] = 1;
      else flags.in_large_b[c] = 0;
      if (large_a[A(q, b)]) flags.image_meets_large_a[c] = 1;
      else flags.image_in_large_a[c] = 0;
    }
  }
  return flags;
}

// True iff some z in Z_d has (z + I) u J = Z_d. I and J hold residues in
// [0, d). O(d^2).
inline bool shift_exists(std::span<const std::uint32_t> I, std::span<const std::uint32_t> J, std::uint32_t d) {
  if (d == 0) throw std::invalid_argument("shift_exists: modulus must be positive");
  std::vector<std::uint8_t> in_i(d, 0), in_j(d, 0);
  for (auto i : I) in_i[i % d] = 1;
  for (auto j : J) in_j[j % d] = 1;
  std::vector<std::uint32_t> missing;  // Z_d \ J, must be covered by z + I
  for (std::uint32_t r = 0; r < d; ++r) {
    if (!in_j[r]) missing.push_back(r);
  }
  for (std::uint32_t z = 0; z < d; ++z) {
    bool covers = true;
    for (auto r : missing) {
      if (!in_i[(r + d - z) % d]) {
        covers = false;
        break;
      }
    }
    if (covers) return true;
  }
  return false;
}

// Two cycles C (length s) and C' (length s' <= s) of UG(a) in a-order, with
// I and J the residues mod d = gcd(s, s') none of whose positions lies in
// L_b-hat.
struct CyclePairContext {
  std::span<const State> longer;
  std::span<const State> shorter;
  std::uint32_t d = 0;
  std::vector<std::uint32_t> I;
  std::vector<std::uint32_t> J;
};

namespace detail {

inline std::vector<std::uint32_t> residues_outside(std::span<const State> cycle, std::uint32_t d, StateMask large_b) {
  std::vector<std::uint8_t> hit(d, 0);
  for (std::size_t i = 0; i < cycle.size(); ++i) {
    if (large_b[cycle[i]]) hit[i % d] = 1;
  }
  std::vector<std::uint32_t> out;
  for (std::uint32_t r = 0; r < d; ++r) {
    if (!hit[r]) out.push_back(r);
  }
  return out;
}

}  // namespace detail

inline CyclePairContext make_cycle_pair_context(std::span<const State> C, std::span<const State> C2,
                                                StateMask large_b) {
  if (C.size() < C2.size()) std::swap(C, C2);
  CyclePairContext ctx;
  ctx.longer = C;
  ctx.shorter = C2;
  ctx.d = static_cast<std::uint32_t>(std::gcd(C.size(), C2.size()));
  ctx.I = detail::residues_outside(C, ctx.d, large_b);
  ctx.J = detail::residues_outside(C2, ctx.d, large_b);
  return ctx;
}

// Every pair of distinct cycles of UG(a) whose shorter member is below n^0.45:
// a loop partner needs the loop inside L_b-hat while the other cycle meets it,
// or the same for the images and L_a-hat; a longer partner must admit no shift.
inline std::optional<FailReason> step7_cycle_pairs(const ClusterStructure& cs_a, const CycleClosureFlags& flags,
                                                   StateMask large_b, std::size_t n) {
  const double threshold = large_cluster_threshold(n);
  const auto clusters = static_cast<std::uint32_t>(cs_a.cluster_count());
  for (std::uint32_t c1 = 0; c1 < clusters; ++c1) {
    for (std::uint32_t c2 = c1 + 1; c2 < clusters; ++c2) {
      std::uint32_t big = c1, small = c2;
      if (cs_a.cycle_length(big) < cs_a.cycle_length(small)) std::swap(big, small);
      const std::size_t s_small = cs_a.cycle_length(small);
      if (static_cast<double>(s_small) >= threshold) continue;
      if (s_small == 1) {
        const bool covered = (flags.meets_large_b[big] && flags.in_large_b[small]) ||
                             (flags.image_meets_large_a[big] && flags.image_in_large_a[small]);
        if (!covered) return FailReason::CyclePairNotCovered;
        continue;
      }
      const auto ctx = make_cycle_pair_context(cs_a.cycle(big), cs_a.cycle(small), large_b);
      if (shift_exists(ctx.I, ctx.J, ctx.d)) return FailReason::ShiftExists;
    }
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------

// The linear part for a two-letter automaton. Guards run in order and the
// first failing one decides; the quadratic oracle is never called here.
inline CheckOutcome binary_linear_check(const Automaton& A) {
  if (A.letters() != 2) throw std::invalid_argument("binary_linear_check: automaton must have exactly two letters");
  const std::size_t n = A.states();
  if (n == 1) return CheckOutcome::synchronizing("trivial");

  const auto scc = analyze_scc(A);
  if (scc.multiple_minimal) return CheckOutcome::not_synchronizing("1");

  const auto cs0 = build_cluster_structure(A, 0);
  const auto cs1 = build_cluster_structure(A, 1);
  if (!cluster_count_ok(cs0, n) || !cluster_count_ok(cs1, n)) return CheckOutcome::fail(FailReason::TooManyClusters, "2");

  // Steps 3 and 4 take the first letter that passes both.
  std::optional<TallestBranchInfo> info;
  std::optional<StatePair> seed;
  bool unique_found = false;
  for (const ClusterStructure* cs : {&cs0, &cs1}) {
    auto candidate = tallest_branch(*cs, cs == &cs0 ? cs1.letter : cs0.letter);
    if (!candidate) continue;
    unique_found = true;
    if (auto s = stable_seed(*candidate, scc, *cs)) {
      info = candidate;
      seed = s;
      break;
    }
  }
  if (!unique_found) return CheckOutcome::fail(FailReason::NoUniqueTallestBranch, "3");
  if (!seed) return CheckOutcome::fail(FailReason::TallestBranchOutsideQ0, "4");
  const ClusterStructure& cs_a1 = info->a1 == 0 ? cs0 : cs1;
  const ClusterStructure& cs_a2 = info->a1 == 0 ? cs1 : cs0;

  const auto Z = multiply_stable_pairs(A, *seed, info->a1, info->a2, n);
  if (!Z) return CheckOutcome::fail(FailReason::TooFewStablePairs, "5");

  if (auto r = check_cluster_graph(cs_a1, Z->z_a1, n)) return CheckOutcome::fail(*r, "6");
  if (auto r = check_cluster_graph(cs_a2, Z->z_a2, n)) return CheckOutcome::fail(*r, "6");

  const auto large1 = large_state_mask(cs_a1, n);
  const auto large2 = large_state_mask(cs_a2, n);

  if (!step7_cycle_majority(cs_a1, large2) || !step7_cycle_majority(cs_a2, large1)) {
    return CheckOutcome::fail(FailReason::CycleMajorityFail, "7.1");
  }
  if (!step7_two_cycles(A, cs_a1, info->a2, large1, large2) || !step7_two_cycles(A, cs_a2, info->a1, large2, large1)) {
    return CheckOutcome::fail(FailReason::TwoCycleFail, "7.2");
  }
  const auto flags1 = cycle_closure_flags(A, cs_a1, info->a2, large1, large2);
  if (auto r = step7_cycle_pairs(cs_a1, flags1, large2, n)) return CheckOutcome::fail(*r, "7.3");
  const auto flags2 = cycle_closure_flags(A, cs_a2, info->a1, large2, large1);
  if (auto r = step7_cycle_pairs(cs_a2, flags2, large1, n)) return CheckOutcome::fail(*r, "7.3");

  return CheckOutcome::synchronizing("7.3");
}

}  // namespace linsync
