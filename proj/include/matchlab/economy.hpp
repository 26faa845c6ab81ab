#pragma once

#include <string>
#include <vector>

#include "matchlab/market.hpp"

namespace matchlab {

/// A finite-state economy with one-sided incomplete information: firms'
/// utilities vary by state, workers' utilities do not (their types reveal
/// nothing about the state). Beliefs are exact rationals with full support.
struct Economy {
  std::vector<Rat> beliefs;                                // one per state, sum 1
  std::vector<std::vector<std::vector<Rat>>> firm_utils;   // [state][firm][worker]
  std::vector<std::vector<Rat>> worker_utils;              // [firm][worker], shared

  int num_states() const { return static_cast<int>(beliefs.size()); }
  int num_firms() const { return firm_utils.empty() ? 0 : static_cast<int>(firm_utils[0].size()); }
  int num_workers() const {
    return worker_utils.empty() ? 0 : static_cast<int>(worker_utils[0].size());
  }

  /// The complete-information market realized in `state`.
  Market market_for(int state) const;

  /// Structural checks: full support, belief sum, per-state strictness.
  /// With `require_unique_stable`, additionally rejects states whose market
  /// has more than one stable matching.
  void validate(bool require_unique_stable = false) const;
};

/// Display names for an economy's agents and states; pure presentation data.
struct AgentNames {
  std::vector<std::string> firms;
  std::vector<std::string> workers;
  std::vector<std::string> states;

  static AgentNames default_for(int num_firms, int num_workers, int num_states);
};

/// A sequential ordering of firm/worker pairs certifying the SPC: the i-th
/// pair is a top-top match of the sub-market left after removing the first
/// i-1 pairs.
struct SpcOrdering {
  std::vector<std::pair<int, int>> pairs;  // (firm, worker), length min(m,n)

  friend auto operator<=>(const SpcOrdering&, const SpcOrdering&) = default;
};

/// Alternating cycle f_1,w_1,...,f_k,w_k of distinct agents where each firm
/// prefers its successor worker to its predecessor and each worker prefers
/// the next firm to the current one (cyclically).
struct PreferenceCycle {
  std::vector<int> firms;
  std::vector<int> workers;  // same length k >= 2

  friend auto operator<=>(const PreferenceCycle&, const PreferenceCycle&) = default;
};

/// Per-state unique stable matching, computed by DA on truthful preferences.
/// Throws ConstructionError if some state is not uniquely stable.
std::vector<Matching> stable_outcome_map(const Economy& economy);

/// All top-top pairs (f, w) of the market: f's favorite listed worker is w
/// and w's favorite listed firm is f. Pairwise disjoint.
std::vector<std::pair<int, int>> top_top_pairs(const OrdinalPreferences& prefs);

/// Every valid SPC ordering of `market` (deduplicated, canonical order).
/// Empty result = the market fails the SPC.
std::vector<SpcOrdering> check_spc(const Market& market);

/// True iff every state's market satisfies the SPC (orderings may differ by
/// state).
bool check_spc_economy(const Economy& economy);

struct SpcStarResult {
  bool satisfied = false;
  /// One witness ordering per state when satisfied.
  std::vector<SpcOrdering> witness;
  /// Human-readable reason when not satisfied.
  std::string reason;
};

/// SPC* = SPC plus the cross-state condition: whenever a worker of order i in
/// some state prefers firm f over his order-i partner, f has order < i in
/// every state. Searched over all selections of per-state SPC orderings.
SpcStarResult check_spc_star(const Economy& economy);

/// True iff all agents on `side` have identical ordinal lists.
bool check_assortative(const Market& market, Side side);

/// All preference cycles with at most `max_k` firms (defaults to min(m,n)),
/// deduplicated up to rotation.
std::vector<PreferenceCycle> find_preference_cycles(const Market& market, int max_k = -1);

struct AugmentCheck {
  bool ok = true;
  std::vector<std::string> failures;
};

/// Checks that `economy` is an augmented economy of `original`: exactly two
/// states; restricting either state to the original agents reproduces
/// `original`'s utilities; beliefs non-degenerate; each state uniquely
/// stable. `added_firms` / `added_workers` list the economy indices of the
/// added agents; the remaining indices, in order, correspond to `original`'s.
AugmentCheck validate_augmented(const Market& original, const Economy& economy,
                                const std::vector<int>& added_firms,
                                const std::vector<int>& added_workers);

}  // namespace matchlab
