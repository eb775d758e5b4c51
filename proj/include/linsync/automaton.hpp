#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rng.hpp"

namespace linsync {

using State = std::uint32_t;
using Letter = std::uint32_t;
using Word = std::vector<Letter>;

// Complete DFA over states 0..n-1 and letters 0..k-1. The transition table is
// stored row-major: delta(q, a) lives at q * k + a. Immutable once built.
class Automaton {
public:
  Automaton(std::size_t n, std::size_t k, std::vector<State> table)
      : n_(n), k_(k), delta_(std::move(table)) {
    if (n_ == 0 || k_ == 0) {
      throw std::invalid_argument("automaton needs at least one state and one letter");
    }
    if (n_ > std::size_t{0xFFFFFFFFu} || delta_.size() != n_ * k_) {
      throw std::invalid_argument("transition table has wrong dimensions");
    }
    for (std::size_t i = 0; i < delta_.size(); ++i) {
      if (delta_[i] >= n_) {
        throw std::invalid_argument("transition target " + std::to_string(delta_[i]) + " of state " +
                                    std::to_string(i / k_) + " is out of range");
      }
    }
  }

  // Row q lists delta(q, 0..k-1).
  Automaton(std::size_t n, std::size_t k, const std::vector<std::vector<State>>& rows)
      : Automaton(n, k, flatten(n, k, rows)) {}
  Automaton(std::size_t n, std::size_t k, std::initializer_list<std::initializer_list<State>> rows)
      : Automaton(n, k, std::vector<std::vector<State>>(rows.begin(), rows.end())) {}

  std::size_t states() const noexcept { return n_; }
  std::size_t letters() const noexcept { return k_; }

  State operator()(State q, Letter a) const noexcept { return delta_[std::size_t{q} * k_ + a]; }
  State next(State q, Letter a) const noexcept { return (*this)(q, a); }

  std::span<const State> row(State q) const noexcept {
    return {delta_.data() + std::size_t{q} * k_, k_};
  }
  std::span<const State> table() const noexcept { return delta_; }

  friend bool operator==(const Automaton&, const Automaton&) = default;

private:
  static std::vector<State> flatten(std::size_t n, std::size_t k,
                                    const std::vector<std::vector<State>>& rows) {
    if (rows.size() != n) throw std::invalid_argument("transition table has wrong number of rows");
    std::vector<State> flat;
    flat.reserve(n * k);
    for (const auto& r : rows) {
      if (r.size() != k) throw std::invalid_argument("transition table row has wrong length");
      flat.insert(flat.end(), r.begin(), r.end());
    }
    return flat;
  }

  std::size_t n_;
  std::size_t k_;
  std::vector<State> delta_;
};

// q.w, reading w left to right.
inline State apply_word(const Automaton& A, State q, std::span<const Letter> w) {
  for (Letter a : w) q = A(q, a);
  return q;
}

inline State apply_word(const Automaton& A, State q, std::initializer_list<Letter> w) {
  return apply_word(A, q, std::span<const Letter>(w.begin(), w.size()));
}

// Each delta(q, a) drawn independently and uniformly from [0, n), filled in
// row-major order from a SplitMix64 stream seeded with `seed`.
inline Automaton generate_uniform(std::size_t n, std::size_t k, std::uint64_t seed) {
  if (n == 0 || k == 0 || n > std::size_t{0xFFFFFFFFu}) {
    throw std::invalid_argument("generate_uniform: n and k must be positive");
  }
  SplitMix64 rng(seed);
  std::vector<State> table(n * k);
  const auto bound = static_cast<std::uint32_t>(n);
  for (auto& t : table) t = rng.below(bound);
  return Automaton(n, k, std::move(table));
}

// Two-letter automaton on the same states whose letters 0 and 1 are the
// letters `first` and `second` of A.
inline Automaton restrict_letters(const Automaton& A, Letter first, Letter second) {
  if (first >= A.letters() || second >= A.letters()) {
    throw std::out_of_range("restrict_letters: letter index out of range");
  }
  if (first == second) throw std::invalid_argument("restrict_letters: letters must be distinct");
  const std::size_t n = A.states();
  std::vector<State> table(2 * n);
  for (State q = 0; q < n; ++q) {
    table[2 * q] = A(q, first);
    table[2 * q + 1] = A(q, second);
  }
  return Automaton(n, 2, std::move(table));
}

// Isomorphic copy of A with state q renamed to perm[q].
inline Automaton relabel(const Automaton& A, std::span<const State> perm) {
  const std::size_t n = A.states(), k = A.letters();
  if (perm.size() != n) throw std::invalid_argument("relabel: permutation has wrong size");
  std::vector<State> table(n * k);
  for (State q = 0; q < n; ++q) {
    for (Letter a = 0; a < k; ++a) table[std::size_t{perm[q]} * k + a] = perm[A(q, a)];
  }
  return Automaton(n, k, std::move(table));
}

}  // namespace linsync
