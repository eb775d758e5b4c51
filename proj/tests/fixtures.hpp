#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include <linsync/automaton.hpp>

namespace fixtures {

using linsync::Automaton;
using linsync::State;

// Cerny automaton C_n: letter 0 is the cyclic shift i -> i+1, letter 1 fixes
// every state except 0 -> 1.
inline Automaton cerny(std::size_t n) {
  std::vector<State> t(2 * n);
  for (State q = 0; q < n; ++q) {
    t[2 * q] = static_cast<State>((q + 1) % n);
    t[2 * q + 1] = q == 0 ? 1 % static_cast<State>(n) : q;
  }
  return Automaton(n, 2, std::move(t));
}

// Letter 0 the cyclic shift, letter 1 the transposition (0 1).
inline Automaton permutations(std::size_t n) {
  std::vector<State> t(2 * n);
  for (State q = 0; q < n; ++q) {
    t[2 * q] = static_cast<State>((q + 1) % n);
    t[2 * q + 1] = q == 0 ? 1 : q == 1 ? 0 : q;
  }
  return Automaton(n, 2, std::move(t));
}

// 13 states: a 5-cycle 0..4 with 1-branches rooted at 5, 6, 7, 8 of heights
// 1, 1, 2, 3 under letter 0. Letter 1 is the shift q -> q+1 mod 13.
inline Automaton figure_one() {
  const std::vector<State> a{1, 2, 3, 4, 0, 0, 1, 2, 3, 7, 8, 10, 8};
  std::vector<State> t(26);
  for (State q = 0; q < 13; ++q) {
    t[2 * q] = a[q];
    t[2 * q + 1] = (q + 1) % 13;
  }
  return Automaton(13, 2, std::move(t));
}

// Independent oracle: breadth-first search over images Q.w for words of
// length at most n^3; true iff some image is a singleton.
inline bool brute_force_synchronizing(const Automaton& A) {
  const std::size_t n = A.states(), k = A.letters();
  if (n == 1) return true;
  const std::uint64_t full = (std::uint64_t{1} << n) - 1;
  const std::uint64_t limit = std::uint64_t{n} * n * n;
  std::unordered_map<std::uint64_t, std::uint64_t> depth{{full, 0}};
  std::vector<std::uint64_t> frontier{full};
  for (std::uint64_t d = 0; d < limit && !frontier.empty(); ++d) {
    std::vector<std::uint64_t> next;
    for (auto S : frontier) {
      for (linsync::Letter a = 0; a < k; ++a) {
        std::uint64_t img = 0;
        for (State q = 0; q < n; ++q) {
          if (S >> q & 1) img |= std::uint64_t{1} << A(q, a);
        }
        if ((img & (img - 1)) == 0) return true;
        if (depth.emplace(img, d + 1).second) next.push_back(img);
      }
    }
    frontier = std::move(next);
  }
  return false;
}

// Every automaton with n states over k letters, in lexicographic table order.
template <class F>
void for_each_automaton(std::size_t n, std::size_t k, F&& f) {
  std::vector<State> t(n * k, 0);
  while (true) {
    f(Automaton(n, k, t));
    std::size_t i = 0;
    while (i < t.size() && ++t[i] == n) t[i++] = 0;
    if (i == t.size()) return;
  }
}

}  // namespace fixtures
