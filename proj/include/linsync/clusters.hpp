#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "automaton.hpp"

namespace linsync {

inline constexpr State kNoState = 0xFFFFFFFFu;

// Decomposition of the functional graph of one letter a. Each weakly
// connected component (cluster) is a single cycle with trees hanging off its
// states; height(q) is the number of a-steps from q to the cycle.
struct ClusterStructure {
  Letter letter = 0;
  std::vector<std::uint32_t> cluster;  // per state
  std::vector<State> tree;             // per state: the cycle state rooting its tree
  std::vector<std::uint32_t> height;   // per state
  std::vector<State> branch;           // per state: root of its 1-branch, kNoState on cycles
  std::vector<std::uint32_t> cycle_pos;  // per cycle state: index in cycle(cluster)
  std::vector<std::uint32_t> size;       // per cluster
  std::vector<std::uint32_t> cycle_offsets;  // CSR, size clusters + 1
  std::vector<State> cycle_states;           // cycle of cluster c, in a-order

  std::size_t states() const noexcept { return cluster.size(); }
  std::size_t cluster_count() const noexcept { return size.size(); }
  std::span<const State> cycle(std::uint32_t c) const noexcept {
    return {cycle_states.data() + cycle_offsets[c], cycle_offsets[c + 1] - cycle_offsets[c]};
  }
  std::size_t cycle_length(std::uint32_t c) const noexcept { return cycle_offsets[c + 1] - cycle_offsets[c]; }
  bool on_cycle(State q) const noexcept { return height[q] == 0; }

  // Number of a-steps from q to the first state of its cycle list, reduced
  // below height(q) + cycle length. Two states of one cluster are eventually
  // mapped to the same cycle state iff these agree modulo the cycle length.
  std::uint64_t steps_to_base(State q) const noexcept {
    const auto len = cycle_length(cluster[q]);
    return std::uint64_t{height[q]} + (len - cycle_pos[tree[q]]) % len;
  }
};

// O(n): walk from each unvisited state until a known state is met. A walk
// that closes on itself found a new cycle; the rest of the path is then
// resolved backwards from its known successor.
inline ClusterStructure build_cluster_structure(const Automaton& A, Letter a) {
  constexpr std::uint32_t kUnset = 0xFFFFFFFFu, kOnPath = 0xFFFFFFFEu;
  const std::size_t n = A.states();
  // One record per state during the walk keeps each random access to a
  // single cache line; split into the public arrays at the end.
  struct Rec {
    std::uint32_t height = kUnset;
    State tree = kNoState;
    std::uint32_t cluster = 0;
    State branch = kNoState;  // cycle_pos on cycle states, path index while walking
  };
  std::vector<Rec> rec(n);
  ClusterStructure cs;
  cs.letter = a;
  cs.cycle_offsets.push_back(0);

  std::vector<State> path;
  for (State s = 0; s < n; ++s) {
    if (rec[s].height != kUnset) continue;
    path.clear();
    State v = s;
    while (rec[v].height == kUnset) {
      rec[v].height = kOnPath;
      rec[v].branch = static_cast<State>(path.size());
      path.push_back(v);
      v = A(v, a);
    }
    if (rec[v].height == kOnPath) {
      const auto c = static_cast<std::uint32_t>(cs.cycle_offsets.size() - 1);
      const std::size_t first = rec[v].branch;
      for (std::size_t i = first; i < path.size(); ++i) {
        const State u = path[i];
        rec[u] = {0, u, c, static_cast<State>(i - first)};
        cs.cycle_states.push_back(u);
      }
      cs.cycle_offsets.push_back(static_cast<std::uint32_t>(cs.cycle_states.size()));
      path.resize(first);
    }
    while (!path.empty()) {
      const State u = path.back();
      path.pop_back();
      const Rec& w = rec[A(u, a)];
      const std::uint32_t h = w.height + 1;
      rec[u] = {h, w.tree, w.cluster, h == 1 ? u : w.branch};
    }
  }

  cs.cluster.resize(n);
  cs.tree.resize(n);
  cs.height.resize(n);
  cs.branch.resize(n);
  cs.cycle_pos.resize(n);
  cs.size.assign(cs.cycle_offsets.size() - 1, 0);
  for (State q = 0; q < n; ++q) {
    const Rec& r = rec[q];
    cs.cluster[q] = r.cluster;
    cs.tree[q] = r.tree;
    cs.height[q] = r.height;
    cs.branch[q] = r.height == 0 ? kNoState : r.branch;
    cs.cycle_pos[q] = r.height == 0 ? r.branch : 0;
    ++cs.size[r.cluster];
  }
  return cs;
}

// The cluster count must not exceed 5 ln n.
inline bool cluster_count_ok(const ClusterStructure& cs, std::size_t n) {
  return static_cast<double>(cs.cluster_count()) <= 5.0 * std::log(static_cast<double>(n));
}

// A cluster is large when its size exceeds n^0.45.
inline double large_cluster_threshold(std::size_t n) { return std::pow(static_cast<double>(n), 0.45); }

inline bool is_large(const ClusterStructure& cs, std::uint32_t c, std::size_t n) {
  return static_cast<double>(cs.size[c]) > large_cluster_threshold(n);
}

// Indicator of the states lying in large clusters.
inline std::vector<std::uint8_t> large_state_mask(const ClusterStructure& cs, std::size_t n) {
  const double threshold = large_cluster_threshold(n);
  std::vector<std::uint8_t> large_cluster(cs.cluster_count());
  for (std::uint32_t c = 0; c < cs.cluster_count(); ++c) large_cluster[c] = cs.size[c] > threshold;
  std::vector<std::uint8_t> mask(cs.states());
  for (State q = 0; q < mask.size(); ++q) mask[q] = large_cluster[cs.cluster[q]];
  return mask;
}

}  // namespace linsync
