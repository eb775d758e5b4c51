#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "automaton.hpp"

namespace linsync {

// Strongly connected components of the underlying graph UG(A) (edges q -> q.a
// for every letter) and its minimal (sink) components.
struct SccAnalysis {
  std::vector<std::uint32_t> component;  // per state, in completion order
  std::vector<std::uint8_t> is_sink;     // per component
  std::size_t sink_count = 0;
  bool multiple_minimal = false;
  std::vector<std::uint8_t> in_q0;       // per state; all zero unless a unique sink exists
  std::uint32_t q0_component = 0;
  std::vector<State> q0_states;          // ascending

  std::size_t component_count() const noexcept { return is_sink.size(); }
  bool has_q0() const noexcept { return sink_count == 1; }
  std::span<const State> q0() const noexcept { return q0_states; }
};

// Iterative Tarjan in the single-array form of Pearce, O(k n). rindex holds
// the DFS index while a state is open and n - component once its component
// is complete. Sink components are recognised during the search: a
// component is a sink iff no edge from it reaches a completed component.
inline SccAnalysis analyze_scc(const Automaton& A) {
  const std::size_t n = A.states();
  const auto k = static_cast<std::uint32_t>(A.letters());

  // Frame flags share a word with the next letter to explore.
  constexpr std::uint32_t kRoot = 1u << 31, kExits = 1u << 30, kLetterMask = kExits - 1;
  struct Frame {
    State v;
    std::uint32_t bits;
  };
  std::vector<std::uint32_t> rindex(n, 0);
  std::vector<State> stack;
  std::vector<Frame> calls;
  std::vector<std::uint8_t> sink;  // per component, in completion order
  std::uint32_t index = 1;
  auto c = static_cast<std::uint32_t>(n);  // open indices never exceed c

  for (State start = 0; start < n; ++start) {
    if (rindex[start] != 0) continue;
    rindex[start] = index++;
    calls.push_back({start, kRoot});
    while (!calls.empty()) {
      Frame& f = calls.back();
      if ((f.bits & kLetterMask) < k) {
        const State w = A(f.v, f.bits & kLetterMask);
        ++f.bits;
        if (rindex[w] == 0) {
          rindex[w] = index++;
          calls.push_back({w, kRoot});
        } else if (rindex[w] > c) {
          f.bits |= kExits;  // completed component
        } else if (rindex[w] < rindex[f.v]) {
          rindex[f.v] = rindex[w];
          f.bits &= ~kRoot;
        }
        continue;
      }
      const Frame done = f;
      calls.pop_back();
      const State v = done.v;
      const bool root = done.bits & kRoot;
      if (root) {
        --index;
        while (!stack.empty() && rindex[v] <= rindex[stack.back()]) {
          rindex[stack.back()] = c;
          stack.pop_back();
          --index;
        }
        rindex[v] = c--;
        sink.push_back(!(done.bits & kExits));
      } else {
        stack.push_back(v);
      }
      if (calls.empty()) continue;
      Frame& parent = calls.back();
      if (root) {
        parent.bits |= kExits;
      } else {
        parent.bits |= done.bits & kExits;
        if (rindex[v] < rindex[parent.v]) {
          rindex[parent.v] = rindex[v];
          parent.bits &= ~kRoot;
        }
      }
    }
  }

  SccAnalysis out;
  out.is_sink = std::move(sink);
  for (std::uint32_t i = 0; i < out.is_sink.size(); ++i) {
    if (out.is_sink[i]) {
      ++out.sink_count;
      out.q0_component = i;
    }
  }
  out.multiple_minimal = out.sink_count >= 2;
  out.component.resize(n);
  out.in_q0.assign(n, 0);
  const auto top = static_cast<std::uint32_t>(n);
  for (State q = 0; q < n; ++q) {
    out.component[q] = top - rindex[q];
    if (out.has_q0() && out.component[q] == out.q0_component) {
      out.in_q0[q] = 1;
      out.q0_states.push_back(q);
    }
  }
  return out;
}

}  // namespace linsync
