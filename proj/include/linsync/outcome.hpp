#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string_view>

namespace linsync {

enum class Verdict { Synchronizing, NotSynchronizing, LinearFail };

// Guard of the linear check that failed. The string codes returned by
// to_string are part of the CLI and CSV output and must stay stable.
enum class FailReason {
  TooManyClusters,
  NoUniqueTallestBranch,
  TallestBranchOutsideQ0,
  TooFewStablePairs,
  NoLargeClusters,
  ClusterGraphDisconnected,
  CongruencesAllHold,
  CycleMajorityFail,
  TwoCycleFail,
  CyclePairNotCovered,
  ShiftExists,
  // Only produced by the multi-letter driver.
  NoLetterPair,
  RestrictionNotSynchronizing,
};

inline constexpr std::array kAllFailReasons{
    FailReason::TooManyClusters,       FailReason::NoUniqueTallestBranch, FailReason::TallestBranchOutsideQ0,
    FailReason::TooFewStablePairs,     FailReason::NoLargeClusters,       FailReason::ClusterGraphDisconnected,
    FailReason::CongruencesAllHold,    FailReason::CycleMajorityFail,     FailReason::TwoCycleFail,
    FailReason::CyclePairNotCovered,   FailReason::ShiftExists,           FailReason::NoLetterPair,
    FailReason::RestrictionNotSynchronizing,
};

constexpr std::string_view to_string(FailReason r) noexcept {
  switch (r) {
    case FailReason::TooManyClusters: return "too_many_clusters";
    case FailReason::NoUniqueTallestBranch: return "no_unique_tallest_branch";
    case FailReason::TallestBranchOutsideQ0: return "tallest_branch_outside_q0";
    case FailReason::TooFewStablePairs: return "too_few_stable_pairs";
    case FailReason::NoLargeClusters: return "no_large_clusters";
    case FailReason::ClusterGraphDisconnected: return "cluster_graph_disconnected";
    case FailReason::CongruencesAllHold: return "congruences_all_hold";
    case FailReason::CycleMajorityFail: return "cycle_majority_fail";
    case FailReason::TwoCycleFail: return "two_cycle_fail";
    case FailReason::CyclePairNotCovered: return "cycle_pair_not_covered";
    case FailReason::ShiftExists: return "shift_exists";
    case FailReason::NoLetterPair: return "no_letter_pair";
    case FailReason::RestrictionNotSynchronizing: return "restriction_not_synchronizing";
  }
  return "unknown";
}

constexpr std::optional<FailReason> fail_reason_from_string(std::string_view s) noexcept {
  for (auto r : kAllFailReasons) {
    if (to_string(r) == s) return r;
  }
  return std::nullopt;
}

constexpr std::string_view to_string(Verdict v) noexcept {
  switch (v) {
    case Verdict::Synchronizing: return "synchronizing";
    case Verdict::NotSynchronizing: return "not synchronizing";
    case Verdict::LinearFail: return "fail";
  }
  return "unknown";
}

// Result of the linear part: a definite answer, or the guard that gave up.
// `step` names the step that decided ("1", "2", ..., "7.3", "pretest").
struct CheckOutcome {
  Verdict verdict = Verdict::Synchronizing;
  std::optional<FailReason> reason;
  std::string_view step;

  static constexpr CheckOutcome synchronizing(std::string_view step = "7.3") noexcept {
    return {Verdict::Synchronizing, std::nullopt, step};
  }
  static constexpr CheckOutcome not_synchronizing(std::string_view step = "1") noexcept {
    return {Verdict::NotSynchronizing, std::nullopt, step};
  }
  static constexpr CheckOutcome fail(FailReason r, std::string_view step) noexcept {
    return {Verdict::LinearFail, r, step};
  }

  bool is_fail() const noexcept { return verdict == Verdict::LinearFail; }
  friend bool operator==(const CheckOutcome&, const CheckOutcome&) = default;
};

}  // namespace linsync
