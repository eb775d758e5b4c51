#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "automaton.hpp"

namespace linsync {

// Thrown when an automaton is too large for the quadratic-memory oracle.
class OracleLimitError : public std::runtime_error {
public:
  OracleLimitError(std::size_t n, std::size_t cap)
      : std::runtime_error("automaton with " + std::to_string(n) + " states exceeds the pair-graph oracle cap of " +
                           std::to_string(cap) + " states"),
        states(n),
        cap(cap) {}
  std::size_t states;
  std::size_t cap;
};

inline constexpr std::size_t kDefaultOracleCap = 20000;
// Largest n whose n(n+1)/2 pair indices fit in 32 bits.
inline constexpr std::size_t kMaxOracleCap = 92681;

// Unordered pair {p, q} (p >= q) <-> p(p+1)/2 + q.
constexpr std::uint64_t pair_index(State p, State q) noexcept {
  if (p < q) std::swap(p, q);
  return std::uint64_t{p} * (p + 1) / 2 + q;
}

constexpr std::uint64_t pair_count(std::size_t n) noexcept { return std::uint64_t{n} * (n + 1) / 2; }

inline std::pair<State, State> pair_from_index(std::uint64_t idx) noexcept {
  auto p = static_cast<std::uint64_t>((std::sqrt(8.0 * static_cast<double>(idx) + 1.0) - 1.0) / 2.0);
  while (p * (p + 1) / 2 > idx) --p;
  while ((p + 1) * (p + 2) / 2 <= idx) ++p;
  return {static_cast<State>(p), static_cast<State>(idx - p * (p + 1) / 2)};
}

// The set of unordered pairs {p, q} (diagonal included) that some word merges.
class MergeablePairs {
public:
  explicit MergeablePairs(std::size_t n) : n_(n), reached_(pair_count(n), 0) {}

  bool contains(State p, State q) const noexcept { return reached_[pair_index(p, q)] != 0; }
  std::size_t size() const noexcept { return count_; }
  std::size_t states() const noexcept { return n_; }
  bool all() const noexcept { return count_ == reached_.size(); }

  // (p, q) with p >= q, in index order.
  std::vector<std::pair<State, State>> list() const {
    std::vector<std::pair<State, State>> out;
    out.reserve(count_);
    for (std::uint64_t i = 0; i < reached_.size(); ++i) {
      if (reached_[i]) out.push_back(pair_from_index(i));
    }
    return out;
  }

private:
  friend MergeablePairs mergeable_pairs(const Automaton&, std::size_t);

  bool mark(std::uint64_t idx) noexcept {
    if (reached_[idx]) return false;
    reached_[idx] = 1;
    ++count_;
    return true;
  }

  std::size_t n_;
  std::size_t count_ = 0;
  std::vector<std::uint8_t> reached_;
};

// Multi-source BFS over reversed pair-graph edges starting from every
// diagonal pair. Predecessors of {p, q} under letter a are the products
// a^-1(p) x a^-1(q), enumerated from per-letter preimage lists, so the edge
// set is never materialised. O(k n^2) time, n(n+1)/2 bytes plus a 32-bit
// queue entry per reached pair.
inline MergeablePairs mergeable_pairs(const Automaton& A, std::size_t cap = kDefaultOracleCap) {
  const std::size_t n = A.states();
  const std::size_t k = A.letters();
  if (n > cap || n > kMaxOracleCap) throw OracleLimitError(n, cap < kMaxOracleCap ? cap : kMaxOracleCap);

  // Preimages in CSR form: for letter a and state s, the states mapped to s
  // are pre[start[a*(n+1)+s] .. start[a*(n+1)+s+1]).
  std::vector<std::uint32_t> start(k * (n + 1), 0);
  std::vector<State> pre(k * n);
  for (Letter a = 0; a < k; ++a) {
    std::uint32_t* st = start.data() + a * (n + 1);
    for (State q = 0; q < n; ++q) ++st[A(q, a) + 1];
    for (std::size_t s = 0; s < n; ++s) st[s + 1] += st[s];
    std::vector<std::uint32_t> fill(st, st + n);
    State* out = pre.data() + a * n;
    for (State q = 0; q < n; ++q) out[fill[A(q, a)]++] = q;
  }

  MergeablePairs result(n);
  std::vector<std::uint32_t> queue;
  queue.reserve(n);
  for (State p = 0; p < n; ++p) {
    const auto idx = pair_index(p, p);
    result.mark(idx);
    queue.push_back(static_cast<std::uint32_t>(idx));
  }

  for (std::size_t head = 0; head < queue.size(); ++head) {
    const auto [p, q] = pair_from_index(queue[head]);
    for (Letter a = 0; a < k; ++a) {
      const std::uint32_t* st = start.data() + a * (n + 1);
      const State* pa = pre.data() + a * n;
      for (std::uint32_t i = st[p]; i < st[p + 1]; ++i) {
        for (std::uint32_t j = st[q]; j < st[q + 1]; ++j) {
          const auto idx = pair_index(pa[i], pa[j]);
          if (result.mark(idx)) queue.push_back(static_cast<std::uint32_t>(idx));
        }
      }
    }
    if (result.all()) break;
  }
  return result;
}

// Synchronizing iff every pair of states can be merged by some word.
inline bool synch_slow(const Automaton& A, std::size_t cap = kDefaultOracleCap) {
  if (A.states() == 1) return true;
  return mergeable_pairs(A, cap).all();
}

}  // namespace linsync
