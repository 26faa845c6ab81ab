#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <vector>

#include "matchlab/rational.hpp"

namespace matchlab {

enum class Side { Firm, Worker };

/// Identifies one agent of a market. Indices are 0-based; the CLI layer maps
/// them to names (f1..fm / w1..wn by default).
struct AgentId {
  Side side;
  int index;

  friend auto operator<=>(const AgentId&, const AgentId&) = default;
};

/// One complete-information matching market: cardinal utilities for both
/// sides, with the unmatched payoff normalized to 0. Entry (i,j) of
/// firm_utils is firm i's utility from worker j; entry (i,j) of worker_utils
/// is worker j's utility from firm i. Non-positive utility means the partner
/// is unacceptable.
struct Market {
  int num_firms = 0;
  int num_workers = 0;
  std::vector<std::vector<Rat>> firm_utils;    // [firm][worker]
  std::vector<std::vector<Rat>> worker_utils;  // [firm][worker]

  /// Throws SchemaError on dimension mismatches, zero entries, or ties
  /// (within a firm's row / within a worker's column).
  void validate() const;

  /// True when every pair is mutually acceptable (all utilities > 0).
  bool all_acceptable() const;
};

/// Restriction of `market` to the given firm and worker index subsets
/// (indices are re-packed in the order given).
Market restrict_market(const Market& market,
                       const std::vector<int>& firms,
                       const std::vector<int>& workers);

/// Strict ordinal preference lists, most preferred first. Unlisted partners
/// are unacceptable. Workers' lists double as reports in the strategy layer.
struct OrdinalPreferences {
  std::vector<std::vector<int>> firm_lists;    // firm i -> ordered worker idx
  std::vector<std::vector<int>> worker_lists;  // worker j -> ordered firm idx

  int num_firms() const { return static_cast<int>(firm_lists.size()); }
  int num_workers() const { return static_cast<int>(worker_lists.size()); }

  friend bool operator==(const OrdinalPreferences&, const OrdinalPreferences&) = default;
};

/// Partial one-to-one assignment. -1 means unmatched. The two directions are
/// kept consistent by construction.
struct Matching {
  std::vector<int> firm_to_worker;
  std::vector<int> worker_to_firm;

  static Matching empty(int num_firms, int num_workers);
  static Matching from_pairs(int num_firms, int num_workers,
                             const std::vector<std::pair<int, int>>& pairs);

  void link(int firm, int worker);
  std::vector<std::pair<int, int>> pairs() const;

  friend auto operator<=>(const Matching&, const Matching&) = default;
};

/// Sorts each side's partners by descending utility and drops unacceptable
/// ones. Throws SchemaError if the market has ties (validate() semantics).
OrdinalPreferences utilities_to_ordinal(const Market& market);

/// Iteration policy for deferred acceptance. Both produce the same matching;
/// keeping two lets tests pin down schedule invariance.
enum class ProposalSchedule { OneAtATime, Rounds };

/// Gale-Shapley deferred acceptance over reported lists. A pair can only
/// form if each side lists the other. The result is stable for `prefs` and
/// proposer-optimal among its stable matchings.
Matching deferred_acceptance(const OrdinalPreferences& prefs, Side proposing,
                             ProposalSchedule schedule = ProposalSchedule::OneAtATime);

struct StabilityReport {
  std::vector<std::pair<int, int>> blocking;  // (firm, worker), lexicographic
  std::vector<AgentId> irrational;            // matched to an unlisted partner
};

/// All blocking pairs of `matching` under `prefs`, plus individually
/// irrational assignments. Unmatched counts as worse than any listed partner.
StabilityReport blocking_pairs(const Matching& matching, const OrdinalPreferences& prefs);

bool is_stable(const Matching& matching, const OrdinalPreferences& prefs);

/// Brute-force enumeration of every stable matching, in canonical
/// (lexicographic by firm assignment) order. Throws SizeBoundExceeded when
/// either side exceeds `size_bound`.
std::vector<Matching> enumerate_stable_matchings(const OrdinalPreferences& prefs,
                                                 int size_bound = 7);

/// Firm-proposing and worker-proposing DA agree exactly when the stable
/// matching is unique.
bool is_unique_stable(const OrdinalPreferences& prefs);

/// 1-based position of `partner` in `agent`'s list; nullopt when unmatched.
/// Throws std::invalid_argument if a matched partner is not listed.
std::optional<int> rank_of(AgentId agent, std::optional<int> partner,
                           const OrdinalPreferences& prefs);

std::set<AgentId> matched_set(const Matching& matching);

}  // namespace matchlab
