#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "matchlab/constructions.hpp"
#include "matchlab/economy.hpp"
#include "matchlab/errors.hpp"
#include "test_support.hpp"

using namespace matchlab;
using matchlab::testing::Rng;

namespace {

// Couples the pairs of an SPC ordering into a matching; excess agents stay
// unmatched. Used as the independent oracle for stable_outcome_map.
Matching couple(const SpcOrdering& ordering, int m, int n) {
  Matching out = Matching::empty(m, n);
  for (auto [f, w] : ordering.pairs) out.link(f, w);
  return out;
}

}  // namespace

TEST_CASE("economy validation") {
  ConstructionBundle mot = motivating_example();
  CHECK_NOTHROW(mot.economy.validate(true));

  Economy bad = mot.economy;
  bad.beliefs = {Rat(1, 2), Rat(1, 3)};
  CHECK_THROWS_AS(bad.validate(), SchemaError);
  bad.beliefs = {Rat(1), Rat(0)};
  CHECK_THROWS_AS(bad.validate(), SchemaError);
}

TEST_CASE("stable_outcome_map on the motivating economy is the diagonal in both states") {
  ConstructionBundle mot = motivating_example();
  auto map = stable_outcome_map(mot.economy);
  REQUIRE(map.size() == 2);
  for (const Matching& m : map) CHECK(m.firm_to_worker == std::vector<int>{0, 1, 2});
}

TEST_CASE("stable_outcome_map on a single-state economy") {
  Rng rng(2001);
  Market m = testing::random_market(rng, 3, 3);
  while (!is_unique_stable(utilities_to_ordinal(m))) m = testing::random_market(rng, 3, 3);
  Economy econ;
  econ.beliefs = {Rat(1)};
  econ.firm_utils = {m.firm_utils};
  econ.worker_utils = m.worker_utils;
  auto map = stable_outcome_map(econ);
  REQUIRE(map.size() == 1);
  CHECK(map[0] == deferred_acceptance(utilities_to_ordinal(m), Side::Firm));
}

TEST_CASE("stable_outcome_map rejects states with several stable matchings") {
  ConstructionBundle mot = motivating_example();
  Market sub = restrict_market(mot.economy.market_for(0), {0, 1}, {0, 1});
  Economy econ;
  econ.beliefs = {Rat(1)};
  econ.firm_utils = {sub.firm_utils};
  econ.worker_utils = sub.worker_utils;
  CHECK_THROWS_AS(stable_outcome_map(econ), ConstructionError);
}

TEST_CASE("SPC holds on the outer sub-market with (f1,w1) first") {
  ConstructionBundle mot = motivating_example();
  Market sub = restrict_market(mot.economy.market_for(0), {0, 2}, {0, 2});
  auto orderings = check_spc(sub);
  REQUIRE(!orderings.empty());
  for (const SpcOrdering& ordering : orderings)
    CHECK(ordering.pairs.front() == std::pair<int, int>{0, 0});
}

TEST_CASE("SPC fails on the full motivating market: no top-top pair at step 1") {
  ConstructionBundle mot = motivating_example();
  for (int s = 0; s < 2; ++s) {
    Market market = mot.economy.market_for(s);
    CHECK(top_top_pairs(utilities_to_ordinal(market)).empty());
    CHECK(check_spc(market).empty());
  }
  CHECK_FALSE(check_spc_economy(mot.economy));
}

TEST_CASE("assortative markets satisfy the SPC with the diagonal ordering") {
  Rng rng(2002);
  for (int trial = 0; trial < 40; ++trial) {
    Market m = testing::random_assortative_market(rng, 3, 3, Side::Firm);
    auto orderings = check_spc(m);
    REQUIRE(!orderings.empty());
    // The shared firm ranking and each top worker's favorite pin the first
    // pair: couple workers in the common order.
    OrdinalPreferences prefs = utilities_to_ordinal(m);
    std::vector<std::pair<int, int>> diagonal;
    std::vector<bool> used(3, false);
    for (int w : prefs.firm_lists[0]) {
      for (int f : prefs.worker_lists[w])
        if (!used[f]) {
          used[f] = true;
          diagonal.emplace_back(f, w);
          break;
        }
    }
    CHECK(std::find_if(orderings.begin(), orderings.end(), [&](const SpcOrdering& o) {
            return o.pairs == diagonal;
          }) != orderings.end());
  }
}

TEST_CASE("single-state SPC economies pass check_spc_economy") {
  Rng rng(2003);
  for (int trial = 0; trial < 20; ++trial) {
    Market m = testing::random_market(rng, 3, 3);
    if (check_spc(m).empty()) continue;
    Economy econ;
    econ.beliefs = {Rat(1)};
    econ.firm_utils = {m.firm_utils};
    econ.worker_utils = m.worker_utils;
    CHECK(check_spc_economy(econ));
  }
}

TEST_CASE("prop4 augmented economies do not satisfy the SPC") {
  // Every original firm tops w1, but w1 tops the added firm F1, whose own
  // top is W1, who in turn tops f_{n-1}: no top-top pair exists at step 1.
  ConstructionBundle bundle = prop4(4, 2);
  CHECK(top_top_pairs(utilities_to_ordinal(bundle.economy.market_for(0))).empty());
  CHECK_FALSE(check_spc_economy(bundle.economy));
  // The assortative base market, by contrast, is SPC with the diagonal.
  auto base_orderings = check_spc(*bundle.original);
  REQUIRE(base_orderings.size() == 1);
  CHECK(base_orderings[0].pairs ==
        std::vector<std::pair<int, int>>{{0, 0}, {1, 1}, {2, 2}, {3, 3}});
}

TEST_CASE("SPC coupling reproduces the unique stable matching") {
  Rng rng(2004);
  int found = 0;
  for (int trial = 0; trial < 400 && found < 60; ++trial) {
    int m = 2 + rng.below(3), n = 2 + rng.below(3);
    Market market = testing::random_market(rng, m, n);
    auto orderings = check_spc(market);
    if (orderings.empty()) continue;
    ++found;
    OrdinalPreferences prefs = utilities_to_ordinal(market);
    auto stable = enumerate_stable_matchings(prefs);
    CHECK(is_unique_stable(prefs));          // SPC sufficiency
    REQUIRE(stable.size() == 1);
    for (const SpcOrdering& ordering : orderings)
      CHECK(couple(ordering, m, n) == stable[0]);
  }
  CHECK(found >= 60);
}

TEST_CASE("no preference cycles implies SPC") {
  Rng rng(2005);
  int cycle_free = 0;
  for (int trial = 0; trial < 400; ++trial) {
    int m = 2 + rng.below(3), n = 2 + rng.below(3);
    Market market = testing::random_market(rng, m, n);
    if (!find_preference_cycles(market).empty()) continue;
    ++cycle_free;
    CHECK_FALSE(check_spc(market).empty());
  }
  CHECK(cycle_free >= 40);
}

TEST_CASE("firm-assortativity implies SPC") {
  Rng rng(2006);
  for (int trial = 0; trial < 60; ++trial) {
    Market market = testing::random_assortative_market(rng, 2 + rng.below(3), 2 + rng.below(3),
                                                       Side::Firm);
    CHECK(check_assortative(market, Side::Firm));
    CHECK_FALSE(check_spc(market).empty());
  }
}

TEST_CASE("check_assortative") {
  ConstructionBundle p4 = prop4(4, 2);
  CHECK(check_assortative(*p4.original, Side::Firm));
  CHECK(check_assortative(*p4.original, Side::Worker));

  ConstructionBundle mot = motivating_example();
  CHECK_FALSE(check_assortative(mot.economy.market_for(0), Side::Firm));

  Market one_by_three;  // a single firm is trivially assortative
  one_by_three.num_firms = 1;
  one_by_three.num_workers = 3;
  one_by_three.firm_utils = {{Rat(2), Rat(3), Rat(1)}};
  one_by_three.worker_utils = {{Rat(1), Rat(1), Rat(1)}};
  CHECK(check_assortative(one_by_three, Side::Firm));
  CHECK(find_preference_cycles(one_by_three).empty());
}

TEST_CASE("the motivating 2x2 sub-market carries the textbook cycle") {
  ConstructionBundle mot = motivating_example();
  Market sub = restrict_market(mot.economy.market_for(0), {0, 1}, {0, 1});
  auto cycles = find_preference_cycles(sub);
  REQUIRE(cycles.size() == 1);
  // f1 prefers w1, who prefers f2, who prefers w2, who prefers f1.
  CHECK(cycles[0].firms == std::vector<int>{0, 1});
  CHECK(cycles[0].workers == std::vector<int>{0, 1});
}

TEST_CASE("the example2 base market has no preference cycles") {
  for (int n : {3, 5, 8}) {
    ConstructionBundle bundle = example2(n);
    CHECK(find_preference_cycles(*bundle.original).empty());
  }
}

TEST_CASE("cycles listed by the pair-graph search satisfy the cyclic conditions") {
  // position() maps unlisted partners past the end, which encodes the
  // partial-list comparison: a listed partner beats an unlisted one.
  Rng rng(2007);
  for (int trial = 0; trial < 120; ++trial) {
    Market market = trial % 2 == 0 ? testing::random_market(rng, 3, 3)
                                   : testing::random_partial_market(rng, 3, 4);
    OrdinalPreferences prefs = utilities_to_ordinal(market);
    auto position = [](const std::vector<int>& list, int who) {
      return std::find(list.begin(), list.end(), who) - list.begin();
    };
    for (const PreferenceCycle& cycle : find_preference_cycles(market)) {
      int k = static_cast<int>(cycle.firms.size());
      REQUIRE(k >= 2);
      for (int t = 0; t < k; ++t) {
        int f = cycle.firms[t];
        int w_cur = cycle.workers[t];
        int w_prev = cycle.workers[(t + k - 1) % k];
        int f_next = cycle.firms[(t + 1) % k];
        CHECK(position(prefs.firm_lists[f], w_cur) < position(prefs.firm_lists[f], w_prev));
        CHECK(position(prefs.worker_lists[w_cur], f_next) <
              position(prefs.worker_lists[w_cur], f));
      }
    }
  }
}

TEST_CASE("SPC* fails on the motivating economy") {
  ConstructionBundle mot = motivating_example();
  SpcStarResult result = check_spc_star(mot.economy);
  CHECK_FALSE(result.satisfied);
  CHECK(!result.reason.empty());
}

TEST_CASE("worker-assortative economies satisfy SPC*") {
  Rng rng(2008);
  for (int trial = 0; trial < 30; ++trial) {
    Market s1 = testing::random_assortative_market(rng, 3, 3, Side::Worker);
    Market s2 = testing::random_market(rng, 3, 3);
    s2.worker_utils = s1.worker_utils;  // shared column rankings carry over
    Economy econ = testing::economy_from_markets(s1, s2);
    SpcStarResult result = check_spc_star(econ);
    CHECK(result.satisfied);
    CHECK(result.witness.size() == 2);
  }
}

TEST_CASE("SPC* holds when the firm order induced by the SPC is state-independent") {
  Rng rng(2009);
  int found = 0;
  for (int trial = 0; trial < 400 && found < 30; ++trial) {
    Market s1 = testing::random_market(rng, 3, 3);
    // State 2 rescales firm cardinals without touching any ordering.
    Market s2 = s1;
    for (auto& row : s2.firm_utils)
      for (Rat& u : row) u = u * Rat(3, 2) + Rat(1, 7);
    Economy econ = testing::economy_from_markets(s1, s2);
    if (!check_spc_economy(econ)) continue;
    ++found;
    CHECK(check_spc_star(econ).satisfied);
  }
  CHECK(found >= 30);
}

TEST_CASE("SPC* is monotone under state deletion") {
  Rng rng(2010);
  int spc_star_count = 0;
  for (int trial = 0; trial < 300 && spc_star_count < 25; ++trial) {
    Economy econ = testing::random_unique_stable_economy(rng, 3, 3);
    if (!check_spc_economy(econ) || !check_spc_star(econ).satisfied) continue;
    ++spc_star_count;
    for (int keep = 0; keep < 2; ++keep) {
      Economy single;
      single.beliefs = {Rat(1)};
      single.firm_utils = {econ.firm_utils[keep]};
      single.worker_utils = econ.worker_utils;
      CHECK(check_spc_star(single).satisfied);
    }
  }
  CHECK(spc_star_count >= 25);
}

TEST_CASE("validate_augmented accepts the motivating economy over its outer block") {
  ConstructionBundle mot = motivating_example();
  AugmentCheck check =
      validate_augmented(*mot.original, mot.economy, mot.added_firms, mot.added_workers);
  CHECK(check.ok);
  CHECK(check.failures.empty());
}

TEST_CASE("validate_augmented reports a perturbed restriction") {
  ConstructionBundle mot = motivating_example();
  Economy tampered = mot.economy;
  tampered.firm_utils[1][0][0] += Rat(1, 10);  // state 2, original firm f1, worker w1
  AugmentCheck check =
      validate_augmented(*mot.original, tampered, mot.added_firms, mot.added_workers);
  CHECK_FALSE(check.ok);
  REQUIRE(!check.failures.empty());
  CHECK(check.failures[0].find("state 2") != std::string::npos);
}

TEST_CASE("validate_augmented accepts prop4 and example2 bundles") {
  ConstructionBundle p4 = prop4(5, 2);
  CHECK(validate_augmented(*p4.original, p4.economy, p4.added_firms, p4.added_workers).ok);
  ConstructionBundle e2 = example2(4);
  CHECK(validate_augmented(*e2.original, e2.economy, e2.added_firms, e2.added_workers).ok);
}

TEST_CASE("validate_augmented flags degenerate beliefs and wrong state counts") {
  ConstructionBundle mot = motivating_example();
  Economy three_states = mot.economy;
  three_states.beliefs = {Rat(1, 2), Rat(1, 4), Rat(1, 4)};
  three_states.firm_utils.push_back(mot.economy.firm_utils[0]);
  AugmentCheck check =
      validate_augmented(*mot.original, three_states, mot.added_firms, mot.added_workers);
  CHECK_FALSE(check.ok);
}

TEST_CASE("SPC handles unbalanced markets") {
  // 2 firms, 3 workers: (f1,w1) then (f2,w2) are sequential top-top pairs;
  // w3 stays unmatched in the unique stable matching.
  Market m;
  m.num_firms = 2;
  m.num_workers = 3;
  m.firm_utils = {{Rat(3), Rat(2), Rat(1)}, {Rat(1), Rat(3), Rat(2)}};
  m.worker_utils = {{Rat(2), Rat(2), Rat(2)}, {Rat(1), Rat(1), Rat(1)}};
  auto orderings = check_spc(m);
  REQUIRE(orderings.size() == 1);
  CHECK(orderings[0].pairs == std::vector<std::pair<int, int>>{{0, 0}, {1, 1}});
  auto stable = enumerate_stable_matchings(utilities_to_ordinal(m));
  REQUIRE(stable.size() == 1);
  CHECK(stable[0].worker_to_firm == std::vector<int>{0, 1, -1});

  Rng rng(2012);
  for (int trial = 0; trial < 60; ++trial) {
    Market wide = testing::random_market(rng, 2, 4);
    auto found = check_spc(wide);
    for (const SpcOrdering& ordering : found) CHECK(ordering.pairs.size() == 2);
    if (!found.empty()) CHECK(is_unique_stable(utilities_to_ordinal(wide)));
  }
}

TEST_CASE("SPC* verdicts survive duplicating a state") {
  // Appending an ordinally identical copy of an existing state changes no
  // ordering set, so both true and false verdicts must persist.
  Rng rng(2013);
  int true_seen = 0, false_seen = 0;
  for (int trial = 0; trial < 400 && (true_seen < 10 || false_seen < 10); ++trial) {
    Economy econ = testing::random_unique_stable_economy(rng, 3, 3);
    if (!check_spc_economy(econ)) continue;
    bool verdict = check_spc_star(econ).satisfied;

    Economy extended = econ;
    extended.beliefs = {Rat(1, 3), Rat(1, 3), Rat(1, 3)};
    extended.firm_utils.push_back(econ.firm_utils[0]);
    for (auto& row : extended.firm_utils[2])
      for (Rat& u : row) u = u * Rat(2) + Rat(1, 5);  // same orderings, new cardinals
    CHECK(check_spc_star(extended).satisfied == verdict);
    (verdict ? true_seen : false_seen) += 1;
  }
  CHECK(true_seen >= 10);
  CHECK(false_seen >= 10);
}

TEST_CASE("stable outcome of a random SPC economy equals top-top coupling per state") {
  Rng rng(2011);
  int found = 0;
  for (int trial = 0; trial < 300 && found < 25; ++trial) {
    Economy econ = testing::random_unique_stable_economy(rng, 3, 3);
    if (!check_spc_economy(econ)) continue;
    ++found;
    auto map = stable_outcome_map(econ);
    for (int s = 0; s < 2; ++s) {
      auto orderings = check_spc(econ.market_for(s));
      REQUIRE(!orderings.empty());
      CHECK(couple(orderings[0], 3, 3) == map[s]);
    }
  }
  CHECK(found >= 25);
}
