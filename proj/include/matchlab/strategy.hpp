#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "matchlab/economy.hpp"

namespace matchlab {

/// Worker report classes, relative to the worker's true ordinal list:
///   Truthful   - the exact true list;
///   Truncation - a prefix of the true list;
///   Dropping   - an order-preserving sublist of the true list;
///   Full       - any ordered subset of all firms (permutations allowed).
enum class StrategyClass { Truthful, Truncation, Dropping, Full };

/// Sweeps come in a straightforward serial form (the reference) and an
/// OpenMP form. Outputs are bit-identical; tests compare the two.
enum class Execution { Serial, Parallel };

constexpr std::uint64_t kDefaultProfileBudget = 100'000'000ULL;

/// One ordered report (acceptable firms, best first) per worker. Firms are
/// always truthful per state and are not part of the profile.
struct StrategyProfile {
  std::vector<std::vector<int>> reports;  // [worker] -> firm indices

  friend auto operator<=>(const StrategyProfile&, const StrategyProfile&) = default;
};

/// The state-indexed matchings a profile induces under the mechanism.
struct OutcomeMap {
  std::vector<Matching> by_state;

  friend auto operator<=>(const OutcomeMap&, const OutcomeMap&) = default;
};

/// Deterministic, indexable enumeration of one worker's reports in a class.
/// Order: Truthful has the single true list; Truncation goes by prefix
/// length; Dropping by keep-mask value (bit t = t-th true-list entry); Full
/// by length, then lexicographically by firm index.
class ReportSpace {
 public:
  ReportSpace(std::vector<int> true_list, int num_firms, StrategyClass cls);

  std::uint64_t size() const { return size_; }
  void report(std::uint64_t index, std::vector<int>& out) const;
  std::vector<int> report(std::uint64_t index) const;

 private:
  friend class ReportCursor;

  std::vector<int> true_list_;
  int num_firms_;
  StrategyClass cls_;
  std::uint64_t size_;
  std::vector<std::uint64_t> cum_;                      // Full: reports shorter than k
  std::vector<std::vector<std::uint64_t>> perm_block_;  // Full: [k][t] = P(m-1-t, k-1-t)
};

/// Sequential iteration over a ReportSpace without per-index unranking. For
/// the Full class the cursor advances an odometer over pick positions and
/// keeps the per-level availability arrays, so most steps rewrite only the
/// report's last entry. Equivalent to calling space.report(i) for i = seek
/// position, seek+1, ...; tests pin the two against each other.
class ReportCursor {
 public:
  explicit ReportCursor(const ReportSpace& space);

  void seek(std::uint64_t index);
  const std::vector<int>& current() const { return report_; }
  bool advance();  // false once the space is exhausted

 private:
  void rebuild_from(int level);

  const ReportSpace* space_;
  std::uint64_t index_ = 0;
  int length_ = 0;                // current report length (Full)
  std::vector<int> digits_;       // pick position per level (Full)
  std::vector<int> avail_;        // [level * m + slot] availability chain (Full)
  std::vector<int> report_;
};

/// Materialized report list, in ReportSpace order. Guarded against huge
/// spaces; sweeps over large spaces use ReportSpace directly.
std::vector<std::vector<int>> enumerate_reports(const std::vector<int>& true_list, int num_firms,
                                                StrategyClass cls);

/// Everyone reports their true list.
StrategyProfile truthful_profile(const Economy& economy);

/// Per state: firm-proposing DA with firms' true state lists and the
/// workers' reports.
OutcomeMap play(const Economy& economy, const StrategyProfile& profile);

/// Belief-weighted true utility of `worker`'s matches under the profile;
/// unmatched states contribute 0.
Rat expected_utility(const Economy& economy, const StrategyProfile& profile, int worker);

/// The sufficiency criterion from the one-sided game: a report is weakly
/// undominated when it is nonempty and lists the true top firm first.
bool is_weakly_undominated(const std::vector<int>& report, const std::vector<int>& true_list);

/// Exact weak-dominance sweep for auditing the criterion above: true iff
/// some alternative report in `cls` does at least as well against every
/// opposing profile in `cls` and strictly better against one. Only feasible
/// at tiny scale (m, n <= 3).
bool is_dominated_exact(const std::vector<int>& report, int worker, const Economy& economy,
                        StrategyClass cls);

struct BestResponses {
  Rat max_eu;
  std::vector<std::vector<int>> reports;  // all argmax reports, space order
};

/// Argmax of expected utility over `worker`'s reports in `cls`, holding the
/// other reports fixed.
BestResponses best_responses(const Economy& economy, const StrategyProfile& profile, int worker,
                             StrategyClass cls, Execution exec = Execution::Parallel);

struct Deviation {
  int worker;
  std::vector<int> report;
  Rat eu_gain;
};

struct EquilibriumReport {
  StrategyProfile profile;
  bool is_bne = false;
  std::optional<Deviation> witness;        // present iff !is_bne
  std::vector<bool> unique_stable_reported;  // per state
  std::vector<bool> undominated;             // per worker
  std::vector<Rat> expected_utilities;       // per worker
};

/// Which deviations to check per worker; nullopt skips a worker entirely
/// (used to focus large verifications on the strategic workers).
struct DeviationSpec {
  std::vector<std::optional<StrategyClass>> per_worker;

  static DeviationSpec uniform(int num_workers, StrategyClass cls);
};

/// BNE verification: no checked worker may have a report with strictly
/// higher expected utility. The witness, when present, is the first
/// improving deviation in (worker, report-space) order.
EquilibriumReport verify_bne(const Economy& economy, const StrategyProfile& profile,
                             const DeviationSpec& spec, Execution exec = Execution::Parallel);

EquilibriumReport is_bne(const Economy& economy, const StrategyProfile& profile,
                         StrategyClass cls, Execution exec = Execution::Parallel);

struct BneGroup {
  OutcomeMap outcome;
  std::uint64_t profile_count = 0;
  std::vector<StrategyProfile> representatives;  // first few, sweep order
};

struct BneEnumeration {
  std::vector<BneGroup> groups;  // ordered by first occurrence in the sweep
  std::uint64_t candidates_swept = 0;
  std::uint64_t bne_count = 0;
};

/// Exhaustive sweep over all profiles in `cls` (optionally restricted to
/// weakly undominated reports), keeping the BNE ones grouped by outcome map.
/// Deviations always range over the whole class. The unfiltered profile
/// count must stay within `budget`; otherwise BudgetExceeded is thrown.
BneEnumeration enumerate_bne(const Economy& economy, StrategyClass cls, bool undominated_only,
                             std::uint64_t budget = kDefaultProfileBudget,
                             Execution exec = Execution::Parallel,
                             std::size_t max_representatives = 16);

/// Per state: do the reported preferences (truthful firms, workers'
/// reports) admit a unique stable matching?
std::vector<bool> unique_stable_for_reported(const Economy& economy,
                                             const StrategyProfile& profile);

/// Every top-top pair of each state's full market must be matched in that
/// state's outcome.
bool verify_top_top_matched(const Economy& economy, const OutcomeMap& outcome);

enum class Verdict { PrefersA, PrefersB, Indifferent, Mixed };

struct OutcomeComparison {
  std::vector<Verdict> firms;    // per-state true utility, dominance order
  std::vector<Verdict> workers;  // expected utility
};

OutcomeComparison compare_outcomes(const Economy& economy, const OutcomeMap& a,
                                   const OutcomeMap& b);

struct RankStats {
  std::vector<Rat> avg_rank_diff;  // per state, mean of rank(base) - rank(alt)
};

/// Average true-list rank difference between two outcomes over a subset of
/// agents. Unmatched counts as rank (list length + 1). By default ranks come
/// from the economy's own per-state ordinal lists; `ranking_prefs`
/// substitutes a fixed list (e.g. the pre-augmentation market's).
RankStats rank_stats(const Economy& economy, const OutcomeMap& base, const OutcomeMap& alt,
                     const std::vector<AgentId>& subset,
                     const OrdinalPreferences* ranking_prefs = nullptr);

}  // namespace matchlab
