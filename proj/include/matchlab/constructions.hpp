#pragma once

#include <string>
#include <vector>

#include "matchlab/economy.hpp"
#include "matchlab/strategy.hpp"

namespace matchlab {

/// An inequality asserted while instantiating a construction's free cardinal
/// parameters ("sufficiently high", "sufficiently close"). lhs > rhs must
/// hold; generators throw ConstructionError otherwise.
struct Constraint {
  std::string description;
  Rat lhs;
  Rat rhs;
};

struct NamedProfile {
  std::string name;
  StrategyProfile profile;
  OutcomeMap expected;  // verified against play() at construction time
};

/// A generated economy together with everything its tests need: the stable
/// outcome map, candidate equilibrium profiles with their expected outcomes,
/// and the cardinal constraints that were asserted.
struct ConstructionBundle {
  std::string kind;
  Economy economy;
  AgentNames names;
  OutcomeMap stable_map;
  std::vector<NamedProfile> profiles;  // profiles[0] is always "truthful"
  std::vector<Constraint> constraints;

  /// The pre-augmentation market and the economy indices of the added
  /// agents, for bundles built by augmenting a complete-information market.
  std::optional<Market> original;
  std::vector<int> added_firms;
  std::vector<int> added_workers;

  const NamedProfile& profile(const std::string& name) const;
};

/// The 3x3 two-state economy with four equilibrium outcomes (truthful plus
/// lambda1..lambda3). `p1` is the first state's probability.
ConstructionBundle motivating_example(const Rat& p1 = Rat(1, 2));

/// The n-firm/n-worker no-cycles market augmented with one firm "f" and one
/// worker "w"; the candidate profile (w and w_n drop f) lifts every original
/// worker's match by roughly n/2 ranks in each state. Requires n >= 3.
ConstructionBundle example2(int n, const Rat& p1 = Rat(1, 2));

/// The doubly-assortative n x n market augmented with k firms F1..Fk and k
/// workers W1..Wk; the candidate dropping profile shifts n-k-1 original
/// workers up by exactly k ranks (in the original lists), identically in
/// both states. Requires 1 <= k <= n-2.
ConstructionBundle prop4(int n, int k, const Rat& p1 = Rat(1, 2));

/// Appends a 3x3 block replicating the motivating example to any balanced,
/// all-acceptable strict market; cross-block partners rank strictly below all
/// same-block ones. Bundles the block's lambda profiles with truthful
/// originals.
ConstructionBundle append_block(const Market& original, const Rat& p1 = Rat(1, 2));

}  // namespace matchlab
