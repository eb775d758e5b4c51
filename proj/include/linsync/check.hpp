#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "automaton.hpp"
#include "lincheck.hpp"
#include "outcome.hpp"
#include "pairgraph.hpp"
#include "scc.hpp"

namespace linsync {

struct CheckOptions {
  // Answer "not synchronizing" straight away when UG(A) over the whole
  // alphabet has two or more sink components.
  bool full_alphabet_pretest = true;
  std::size_t oracle_cap = kDefaultOracleCap;
};

enum class Method { Linear, Fallback, Quadratic };

constexpr std::string_view to_string(Method m) noexcept {
  switch (m) {
    case Method::Linear: return "linear";
    case Method::Fallback: return "fallback";
    case Method::Quadratic: return "quadratic";
  }
  return "unknown";
}

struct LinearResult {
  CheckOutcome outcome;
  std::vector<CheckOutcome> pair_outcomes;  // one per letter pair tried
};

// The linear part over any alphabet: the binary check on letter pairs
// (0,1), (2,3), ..., (t-1,t) with t = 2 floor(k/2), stopping at the first
// pair that proves synchronization. Never calls the oracle.
inline LinearResult linear_part(const Automaton& A, const CheckOptions& opts = {}) {
  LinearResult res;
  const std::size_t k = A.letters();
  if (A.states() == 1) {
    res.outcome = CheckOutcome::synchronizing("trivial");
    return res;
  }
  if (k == 2) {
    // The restriction is A itself, so a Step-1 negative is final.
    res.outcome = binary_linear_check(A);
    res.pair_outcomes.push_back(res.outcome);
    return res;
  }
  if (opts.full_alphabet_pretest && analyze_scc(A).multiple_minimal) {
    res.outcome = CheckOutcome::not_synchronizing("pretest");
    return res;
  }
  for (Letter a = 0; a + 1 < k; a += 2) {
    const auto out = binary_linear_check(restrict_letters(A, a, a + 1));
    res.pair_outcomes.push_back(out);
    if (out.verdict == Verdict::Synchronizing) {
      res.outcome = out;
      return res;
    }
  }
  if (res.pair_outcomes.empty()) {
    res.outcome = CheckOutcome::fail(FailReason::NoLetterPair, "driver");
  } else {
    const auto& first = res.pair_outcomes.front();
    res.outcome = first.is_fail() ? first : CheckOutcome::fail(FailReason::RestrictionNotSynchronizing, first.step);
  }
  return res;
}

struct CheckResult {
  bool synchronizing = false;
  Method method = Method::Linear;
  LinearResult linear;  // empty when the linear part was skipped
};

// Linear part first; the pair-graph oracle decides whenever the linear part
// gives up. One- and two-state automata skip the linear part.
inline CheckResult check_synchronizing(const Automaton& A, const CheckOptions& opts = {}) {
  CheckResult res;
  if (A.states() == 1) {
    res.synchronizing = true;
    res.linear.outcome = CheckOutcome::synchronizing("trivial");
    return res;
  }
  if (A.states() == 2) {
    res.synchronizing = synch_slow(A, opts.oracle_cap);
    res.method = Method::Fallback;
    return res;
  }
  res.linear = linear_part(A, opts);
  switch (res.linear.outcome.verdict) {
    case Verdict::Synchronizing:
      res.synchronizing = true;
      break;
    case Verdict::NotSynchronizing:
      res.synchronizing = false;
      break;
    case Verdict::LinearFail:
      res.synchronizing = synch_slow(A, opts.oracle_cap);
      res.method = Method::Fallback;
      break;
  }
  return res;
}

}  // namespace linsync
