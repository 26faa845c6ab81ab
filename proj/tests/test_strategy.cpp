#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>

#ifdef MATCHLAB_HAVE_OPENMP
#include <omp.h>
#endif

#include "matchlab/constructions.hpp"
#include "matchlab/engine.hpp"
#include "matchlab/errors.hpp"
#include "matchlab/strategy.hpp"
#include "test_support.hpp"

using namespace matchlab;
using matchlab::testing::Rng;

TEST_CASE("play reproduces the bundled outcome maps") {
  ConstructionBundle mot = motivating_example();

  OutcomeMap lambda1 = play(mot.economy, mot.profile("lambda1").profile);
  CHECK(lambda1.by_state[0].firm_to_worker == std::vector<int>{1, 0, 2});
  CHECK(lambda1.by_state[1].firm_to_worker == std::vector<int>{1, 2, 0});

  OutcomeMap lambda3 = play(mot.economy, mot.profile("lambda3").profile);
  CHECK(lambda3.by_state[0].worker_to_firm[2] == -1);
  CHECK(lambda3.by_state[0].firm_to_worker[2] == -1);

  OutcomeMap truthful = play(mot.economy, mot.profile("truthful").profile);
  CHECK(truthful.by_state == stable_outcome_map(mot.economy));
}

TEST_CASE("expected utilities from the motivating economy") {
  ConstructionBundle mot = motivating_example();
  CHECK(expected_utility(mot.economy, mot.profile("lambda1").profile, 0) == Rat(3));
  CHECK(expected_utility(mot.economy, mot.profile("truthful").profile, 0) == Rat(2));

  StrategyProfile empty = mot.profile("truthful").profile;
  empty.reports[0].clear();
  CHECK(expected_utility(mot.economy, empty, 0) == Rat(0));
}

TEST_CASE("report spaces have the advertised sizes and no duplicates") {
  std::vector<int> truth = {1, 0, 2};
  CHECK(enumerate_reports(truth, 3, StrategyClass::Truthful).size() == 1);
  CHECK(enumerate_reports(truth, 3, StrategyClass::Truncation).size() == 4);
  CHECK(enumerate_reports(truth, 3, StrategyClass::Dropping).size() == 8);
  auto full = enumerate_reports(truth, 3, StrategyClass::Full);
  CHECK(full.size() == 16);  // 1 + 3 + 6 + 6

  for (StrategyClass cls : {StrategyClass::Truncation, StrategyClass::Dropping,
                            StrategyClass::Full}) {
    auto reports = enumerate_reports(truth, 3, cls);
    std::set<std::vector<int>> unique(reports.begin(), reports.end());
    CHECK(unique.size() == reports.size());
  }

  // Truncations are prefixes; droppings are order-preserving sublists.
  for (const auto& rep : enumerate_reports(truth, 3, StrategyClass::Truncation))
    CHECK(std::equal(rep.begin(), rep.end(), truth.begin()));
  for (const auto& rep : enumerate_reports(truth, 3, StrategyClass::Dropping)) {
    auto it = truth.begin();
    for (int f : rep) {
      it = std::find(it, truth.end(), f);
      CHECK(it != truth.end());
      ++it;
    }
  }

  // Full order: by length, then lexicographic by firm index.
  CHECK(full[0].empty());
  CHECK(full[1] == std::vector<int>{0});
  CHECK(full[4] == std::vector<int>{0, 1});
  CHECK(full[9] == std::vector<int>{2, 1});
  CHECK(full[10] == std::vector<int>{0, 1, 2});
  CHECK(full[15] == std::vector<int>{2, 1, 0});
}

TEST_CASE("larger full spaces match the permutation-count formula") {
  std::vector<int> truth = {0, 1, 2, 3, 4};
  ReportSpace space(truth, 5, StrategyClass::Full);
  CHECK(space.size() == 1 + 5 + 20 + 60 + 120 + 120);
  std::set<std::vector<int>> seen;
  for (std::uint64_t r = 0; r < space.size(); ++r) CHECK(seen.insert(space.report(r)).second);
}

TEST_CASE("the sequential cursor replays the random-access enumeration") {
  for (StrategyClass cls : {StrategyClass::Full, StrategyClass::Dropping,
                            StrategyClass::Truncation, StrategyClass::Truthful}) {
    std::vector<int> truth = {2, 0, 3, 1, 4};
    ReportSpace space(truth, 5, cls);
    ReportCursor cursor(space);
    for (std::uint64_t r = 0; r < space.size(); ++r) {
      CHECK(cursor.current() == space.report(r));
      cursor.advance();
    }
    CHECK_FALSE(cursor.advance());
  }

  // Spot-check mid-space seeks in a space too large to walk fully.
  std::vector<int> big_truth = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  ReportSpace big(big_truth, 11, StrategyClass::Full);
  Rng rng(3005);
  ReportCursor cursor(big);
  for (int trial = 0; trial < 200; ++trial) {
    std::uint64_t start = rng.next() % (big.size() - 64);
    cursor.seek(start);
    for (std::uint64_t r = start; r < start + 64; ++r) {
      CHECK(cursor.current() == big.report(r));
      cursor.advance();
    }
  }
}

TEST_CASE("weak undominatedness criterion: nonempty and true-top first") {
  std::vector<int> truth = {1, 0, 2};  // w1's list in the motivating economy
  CHECK(is_weakly_undominated({1, 2}, truth));
  CHECK(is_weakly_undominated({1}, truth));
  CHECK_FALSE(is_weakly_undominated({0, 1, 2}, truth));
  CHECK_FALSE(is_weakly_undominated({}, truth));
}

TEST_CASE("exact dominance sweep audits the criterion at 3x3") {
  ConstructionBundle mot = motivating_example();
  // Not top-first: dominated (shifting the true top up can only help).
  CHECK(is_dominated_exact({0, 1, 2}, 0, mot.economy, StrategyClass::Full));
  // The truthful report survives the sweep.
  CHECK_FALSE(is_dominated_exact({1, 0, 2}, 0, mot.economy, StrategyClass::Full));
  // The bare top [f2] passes the top-first criterion yet is dominated by
  // [f2,f3]: when another worker intercepts f2, the longer list still
  // collects f3, and holding f3 never blocks a useful rejection chain here.
  // The criterion is sufficient-only, which is exactly what this sweep is
  // for.
  CHECK(is_dominated_exact({1}, 0, mot.economy, StrategyClass::Full));

  Economy big = example2(3).economy;
  CHECK_THROWS_AS(is_dominated_exact({0}, 0, big, StrategyClass::Full), SizeBoundExceeded);
}

TEST_CASE("best responses against the lambda1 profile") {
  ConstructionBundle mot = motivating_example();
  const StrategyProfile& lambda1 = mot.profile("lambda1").profile;

  BestResponses full = best_responses(mot.economy, lambda1, 0, StrategyClass::Full);
  CHECK(full.max_eu == Rat(3));
  CHECK(std::find(full.reports.begin(), full.reports.end(), std::vector<int>{1, 2}) !=
        full.reports.end());

  // Truncations cap out strictly below the dropping report's payoff, for
  // both of the workers who drop f1.
  BestResponses trunc_w1 = best_responses(mot.economy, lambda1, 0, StrategyClass::Truncation);
  CHECK(trunc_w1.max_eu == Rat(5, 2));
  CHECK(trunc_w1.max_eu < full.max_eu);
  BestResponses trunc_w3 = best_responses(mot.economy, lambda1, 2, StrategyClass::Truncation);
  BestResponses full_w3 = best_responses(mot.economy, lambda1, 2, StrategyClass::Full);
  CHECK(trunc_w3.max_eu == Rat(5, 2));
  CHECK(full_w3.max_eu == Rat(3));
  CHECK(trunc_w3.max_eu < full_w3.max_eu);
}

TEST_CASE("best response in a single-firm economy is the bare listing") {
  Economy econ;
  econ.beliefs = {Rat(1)};
  econ.firm_utils = {{{Rat(1)}}};
  econ.worker_utils = {{Rat(1)}};
  StrategyProfile profile;
  profile.reports = {{0}};
  BestResponses best = best_responses(econ, profile, 0, StrategyClass::Full);
  CHECK(best.max_eu == Rat(1));
  CHECK(std::find(best.reports.begin(), best.reports.end(), std::vector<int>{0}) !=
        best.reports.end());
}

TEST_CASE("all four motivating profiles are BNE under the full class") {
  ConstructionBundle mot = motivating_example();
  for (const char* name : {"truthful", "lambda1", "lambda2", "lambda3"}) {
    EquilibriumReport report = is_bne(mot.economy, mot.profile(name).profile, StrategyClass::Full);
    CHECK(report.is_bne);
    CHECK(!report.witness.has_value());
    for (bool flag : report.undominated) CHECK(flag);
    for (bool flag : report.unique_stable_reported) CHECK(flag);
  }
}

TEST_CASE("a worker hiding his top firm is not at equilibrium") {
  ConstructionBundle mot = motivating_example();
  StrategyProfile bad = mot.profile("truthful").profile;
  bad.reports[0] = {2};  // w1 lists only f3
  EquilibriumReport report = is_bne(mot.economy, bad, StrategyClass::Full);
  CHECK_FALSE(report.is_bne);
  REQUIRE(report.witness.has_value());
  CHECK(report.witness->worker == 0);
  CHECK(report.witness->eu_gain > Rat(0));
  // Restoring the true top to the front is such an improving deviation.
  StrategyProfile shifted = bad;
  shifted.reports[0] = {1, 0, 2};
  CHECK(expected_utility(mot.economy, shifted, 0) > expected_utility(mot.economy, bad, 0));
}

TEST_CASE("enumerate_bne finds exactly the four motivating outcome maps") {
  ConstructionBundle mot = motivating_example();

  BneEnumeration undominated = enumerate_bne(mot.economy, StrategyClass::Full, true);
  CHECK(undominated.candidates_swept == 125);  // 5x5x5 top-first reports
  CHECK(undominated.bne_count == 11);
  REQUIRE(undominated.groups.size() == 4);
  auto group_count = [&](const OutcomeMap& om) -> std::uint64_t {
    for (const BneGroup& g : undominated.groups)
      if (g.outcome == om) return g.profile_count;
    return 0;
  };
  CHECK(group_count(mot.profile("truthful").expected) == 4);
  CHECK(group_count(mot.profile("lambda1").expected) == 4);
  CHECK(group_count(mot.profile("lambda2").expected) == 1);
  CHECK(group_count(mot.profile("lambda3").expected) == 2);

  // The unfiltered sweep lands on the same four outcome maps.
  BneEnumeration full = enumerate_bne(mot.economy, StrategyClass::Full, false);
  CHECK(full.candidates_swept == 4096);
  CHECK(full.bne_count == 378);
  REQUIRE(full.groups.size() == 4);
  for (const BneGroup& g : full.groups) {
    bool known = false;
    for (const auto& np : mot.profiles) known = known || g.outcome == np.expected;
    CHECK(known);
  }
}

TEST_CASE("lambda2's reported preferences weave a three-pair cycle in state 1") {
  // The true state-1 market has only the two-pair cycle; the lambda2
  // reports create one spanning all three firms and workers.
  ConstructionBundle mot = motivating_example();
  Market true_market = mot.economy.market_for(0);

  auto max_cycle_span = [](const std::vector<PreferenceCycle>& cycles) {
    std::size_t span = 0;
    for (const PreferenceCycle& c : cycles) span = std::max(span, c.firms.size());
    return span;
  };
  CHECK(max_cycle_span(find_preference_cycles(true_market)) == 2);

  // Market whose ordinal content is (true firm lists, lambda2 reports):
  // utilities from list positions, unlisted firms marked unacceptable.
  Market reported = true_market;
  const auto& reports = mot.profile("lambda2").profile.reports;
  for (int w = 0; w < 3; ++w) {
    for (int f = 0; f < 3; ++f) reported.worker_utils[f][w] = Rat(-1 - f);
    for (std::size_t pos = 0; pos < reports[w].size(); ++pos)
      reported.worker_utils[reports[w][pos]][w] = Rat(3 - static_cast<int>(pos));
  }
  CHECK(max_cycle_span(find_preference_cycles(reported)) == 3);
}

TEST_CASE("the permuted outcome maps are supported only by permuting profiles") {
  ConstructionBundle mot = motivating_example();
  BneEnumeration result = enumerate_bne(mot.economy, StrategyClass::Full, false);
  StrategyProfile truth = truthful_profile(mot.economy);

  auto is_dropping_of = [](const std::vector<int>& report, const std::vector<int>& list) {
    auto it = list.begin();
    for (int f : report) {
      it = std::find(it, list.end(), f);
      if (it == list.end()) return false;
      ++it;
    }
    return true;
  };

  for (const BneGroup& group : result.groups) {
    bool is_lambda2 = group.outcome == mot.profile("lambda2").expected;
    bool is_lambda3 = group.outcome == mot.profile("lambda3").expected;
    if (!is_lambda2 && !is_lambda3) continue;
    REQUIRE(group.representatives.size() == group.profile_count);  // small groups
    for (const StrategyProfile& profile : group.representatives) {
      bool any_permuted = false;
      for (int w = 0; w < 3; ++w)
        any_permuted = any_permuted || !is_dropping_of(profile.reports[w], truth.reports[w]);
      CHECK(any_permuted);
    }
  }
}

TEST_CASE("the four equilibria survive order-preserving payoff perturbations") {
  ConstructionBundle mot = motivating_example();
  Economy perturbed = mot.economy;
  // Distinct tiny offsets keep every ordering and break no strictness.
  Rat eps(1, 1000);
  for (int s = 0; s < 2; ++s)
    for (int f = 0; f < 3; ++f)
      for (int w = 0; w < 3; ++w) perturbed.firm_utils[s][f][w] += eps * Rat(3 * f + w + 1);
  for (int f = 0; f < 3; ++f)
    for (int w = 0; w < 3; ++w) perturbed.worker_utils[f][w] += eps * Rat(3 * w + f + 1);
  perturbed.validate(true);

  for (const char* name : {"truthful", "lambda1", "lambda2", "lambda3"}) {
    const NamedProfile& np = mot.profile(name);
    CHECK(play(perturbed, np.profile) == np.expected);
    CHECK(is_bne(perturbed, np.profile, StrategyClass::Full).is_bne);
  }
}

TEST_CASE("enumerate_bne respects the profile budget") {
  ConstructionBundle mot = motivating_example();
  CHECK_THROWS_AS(enumerate_bne(mot.economy, StrategyClass::Full, false, 1000), BudgetExceeded);
}

TEST_CASE("every representative profile reported by enumerate_bne verifies as a BNE") {
  ConstructionBundle mot = motivating_example();
  BneEnumeration result = enumerate_bne(mot.economy, StrategyClass::Full, true);
  for (const BneGroup& group : result.groups)
    for (const StrategyProfile& profile : group.representatives) {
      EquilibriumReport report = is_bne(mot.economy, profile, StrategyClass::Full);
      CHECK(report.is_bne);
      CHECK(play(mot.economy, profile) == group.outcome);
    }
}

TEST_CASE("BNE under the full class survives restriction to any sub-class") {
  ConstructionBundle mot = motivating_example();
  for (const char* name : {"truthful", "lambda1", "lambda2", "lambda3"})
    for (StrategyClass cls : {StrategyClass::Truthful, StrategyClass::Truncation,
                              StrategyClass::Dropping})
      CHECK(is_bne(mot.economy, mot.profile(name).profile, cls).is_bne);

  Rng rng(3001);
  for (int trial = 0; trial < 10; ++trial) {
    Economy econ = testing::random_unique_stable_economy(rng, 3, 3);
    BneEnumeration result = enumerate_bne(econ, StrategyClass::Full, false);
    for (const BneGroup& group : result.groups)
      for (const StrategyProfile& profile : group.representatives)
        for (StrategyClass cls : {StrategyClass::Truncation, StrategyClass::Dropping})
          CHECK(is_bne(econ, profile, cls).is_bne);
  }
}

TEST_CASE("unique_stable_for_reported") {
  ConstructionBundle mot = motivating_example();
  for (const char* name : {"truthful", "lambda1", "lambda2", "lambda3"}) {
    auto flags = unique_stable_for_reported(mot.economy, mot.profile(name).profile);
    for (bool flag : flags) CHECK(flag);
  }
  // A profile reproducing the 2x2 cycle in the reports: w1 and w2 swap
  // their listing of f1/f2, making both stable matchings feasible.
  StrategyProfile cyclic = mot.profile("truthful").profile;
  cyclic.reports[2] = {};  // w3 out; f3 then matches nobody relevant
  auto flags = unique_stable_for_reported(mot.economy, cyclic);
  CHECK_FALSE(flags[0]);  // state 1: the f1/f2 x w1/w2 cycle is live
}

TEST_CASE("verify_top_top_matched") {
  ConstructionBundle mot = motivating_example();
  CHECK(verify_top_top_matched(mot.economy, mot.stable_map));
  for (const auto& np : mot.profiles) CHECK(verify_top_top_matched(mot.economy, np.expected));

  // Economy whose state-1 market has the top-top pair (f1,w2): an outcome
  // leaving that pair unmatched must be flagged.
  Economy econ;
  econ.beliefs = {Rat(1)};
  econ.firm_utils = {{{Rat(1), Rat(2)}, {Rat(2), Rat(1)}}};  // f1 tops w2
  econ.worker_utils = {{Rat(1), Rat(2)}, {Rat(2), Rat(1)}};  // w2 tops f1
  OutcomeMap crossed;
  crossed.by_state = {Matching::from_pairs(2, 2, {{0, 0}, {1, 1}})};
  CHECK_FALSE(verify_top_top_matched(econ, crossed));
  OutcomeMap aligned;
  aligned.by_state = {Matching::from_pairs(2, 2, {{0, 1}, {1, 0}})};
  CHECK(verify_top_top_matched(econ, aligned));
}

TEST_CASE("compare_outcomes reproduces the lattice-breakdown verdicts") {
  ConstructionBundle mot = motivating_example();
  const OutcomeMap& lambda1 = mot.profile("lambda1").expected;
  const OutcomeMap& lambda2 = mot.profile("lambda2").expected;

  OutcomeComparison cmp = compare_outcomes(mot.economy, lambda2, lambda1);
  CHECK(cmp.firms[0] == Verdict::PrefersA);    // f1 prefers lambda2
  CHECK(cmp.workers[2] == Verdict::PrefersA);  // w3 prefers lambda2
  CHECK(cmp.firms[2] == Verdict::PrefersB);    // f3 prefers lambda1
  CHECK(cmp.workers[1] == Verdict::PrefersB);  // w2 prefers lambda1
  CHECK(cmp.firms[1] == Verdict::Indifferent);
  CHECK(cmp.workers[0] == Verdict::Indifferent);

  // Workers uniformly prefer lambda1 to the stable outcome.
  OutcomeComparison against_stable = compare_outcomes(mot.economy, lambda1, mot.stable_map);
  for (Verdict v : against_stable.workers) CHECK(v == Verdict::PrefersA);

  OutcomeComparison self = compare_outcomes(mot.economy, lambda1, lambda1);
  for (Verdict v : self.firms) CHECK(v == Verdict::Indifferent);
  for (Verdict v : self.workers) CHECK(v == Verdict::Indifferent);
}

TEST_CASE("firms with opposing per-state comparisons come out mixed") {
  Economy econ;
  econ.beliefs = {Rat(1, 2), Rat(1, 2)};
  econ.firm_utils = {{{Rat(2), Rat(1)}, {Rat(1), Rat(2)}}, {{Rat(2), Rat(1)}, {Rat(1), Rat(2)}}};
  econ.worker_utils = {{Rat(2), Rat(1)}, {Rat(1), Rat(2)}};
  OutcomeMap a, b;
  a.by_state = {Matching::from_pairs(2, 2, {{0, 0}, {1, 1}}),
                Matching::from_pairs(2, 2, {{0, 1}, {1, 0}})};
  b.by_state = {Matching::from_pairs(2, 2, {{0, 1}, {1, 0}}),
                Matching::from_pairs(2, 2, {{0, 0}, {1, 1}})};
  OutcomeComparison cmp = compare_outcomes(econ, a, b);
  CHECK(cmp.firms[0] == Verdict::Mixed);
  CHECK(cmp.firms[1] == Verdict::Mixed);
  CHECK(cmp.workers[0] == Verdict::Indifferent);  // same payoff profile, swapped states
}

TEST_CASE("rank_stats") {
  ConstructionBundle mot = motivating_example();
  std::vector<AgentId> workers = {{Side::Worker, 0}, {Side::Worker, 1}, {Side::Worker, 2}};

  RankStats zero = rank_stats(mot.economy, mot.stable_map, mot.stable_map, workers);
  for (const Rat& d : zero.avg_rank_diff) CHECK(d == Rat(0));

  // Against lambda3 in state 1, w1 and w2 each move up one rank (f1->f2 and
  // f2->f1), while w3 goes from f3 (rank 3) to unmatched (rank 4).
  RankStats vs3 = rank_stats(mot.economy, mot.stable_map, mot.profile("lambda3").expected,
                             workers);
  CHECK(vs3.avg_rank_diff[0] == Rat(1, 3));  // (+1 + 1 - 1) / 3
  std::vector<AgentId> w3_only = {{Side::Worker, 2}};
  RankStats w3 = rank_stats(mot.economy, mot.stable_map, mot.profile("lambda3").expected,
                            w3_only);
  CHECK(w3.avg_rank_diff[0] == Rat(-1));  // unmatched counts as rank 4
}

TEST_CASE("engine outcomes and scaled utilities agree with the reference path") {
  Rng rng(3002);
  for (int trial = 0; trial < 40; ++trial) {
    Economy econ = testing::random_unique_stable_economy(rng, 3, 3);
    // Stress the common-denominator scaling: asymmetric beliefs and a few
    // fractional utilities (order-preserving, so unique stability holds).
    if (trial % 2 == 0) {
      econ.beliefs = {Rat(1, 3), Rat(2, 3)};
      for (auto& row : econ.worker_utils)
        for (Rat& u : row) u = u * Rat(5, 7) + Rat(1, 11);
    }
    Engine engine(econ);
    EngineWorkspace ws;
    engine.init_workspace(ws);

    StrategyProfile profile;
    for (int w = 0; w < 3; ++w) {
      auto reports = enumerate_reports(engine.true_worker_lists()[w], 3, StrategyClass::Full);
      profile.reports.push_back(reports[rng.below(static_cast<int>(reports.size()))]);
    }
    engine.set_profile(ws, profile);
    OutcomeMap via_play = play(econ, profile);
    for (int s = 0; s < 2; ++s) {
      engine.play_state(ws, s);
      for (int w = 0; w < 3; ++w)
        CHECK(static_cast<int>(ws.held[w]) == via_play.by_state[s].worker_to_firm[w]);
    }
    for (int w = 0; w < 3; ++w) {
      Rat scaled = Rat(engine.scaled_eu(ws, w)) / engine.scale_factor();
      CHECK(scaled == expected_utility(econ, profile, w));
    }
  }
}

TEST_CASE("sweeps are bit-identical across execution modes and repeated runs") {
  ConstructionBundle mot = motivating_example();

  auto as_tuple = [](const BneEnumeration& e) {
    std::vector<std::tuple<OutcomeMap, std::uint64_t, std::vector<StrategyProfile>>> out;
    for (const BneGroup& g : e.groups) out.emplace_back(g.outcome, g.profile_count,
                                                        g.representatives);
    return out;
  };
  BneEnumeration serial = enumerate_bne(mot.economy, StrategyClass::Full, false,
                                        kDefaultProfileBudget, Execution::Serial);
  BneEnumeration parallel = enumerate_bne(mot.economy, StrategyClass::Full, false,
                                          kDefaultProfileBudget, Execution::Parallel);
  BneEnumeration parallel2 = enumerate_bne(mot.economy, StrategyClass::Full, false,
                                           kDefaultProfileBudget, Execution::Parallel);
  CHECK(as_tuple(serial) == as_tuple(parallel));
  CHECK(as_tuple(parallel) == as_tuple(parallel2));
  CHECK(serial.bne_count == parallel.bne_count);
  CHECK(serial.candidates_swept == parallel.candidates_swept);

  // Witness determinism on a non-equilibrium profile.
  StrategyProfile bad = mot.profile("truthful").profile;
  bad.reports[0] = {2};
  EquilibriumReport rs = is_bne(mot.economy, bad, StrategyClass::Full, Execution::Serial);
  EquilibriumReport rp = is_bne(mot.economy, bad, StrategyClass::Full, Execution::Parallel);
  REQUIRE(rs.witness.has_value());
  REQUIRE(rp.witness.has_value());
  CHECK(rs.witness->worker == rp.witness->worker);
  CHECK(rs.witness->report == rp.witness->report);
  CHECK(rs.witness->eu_gain == rp.witness->eu_gain);
}

TEST_CASE("parallel sweeps are invariant to the thread count") {
#ifdef MATCHLAB_HAVE_OPENMP
  ConstructionBundle mot = motivating_example();
  BneEnumeration wide = enumerate_bne(mot.economy, StrategyClass::Full, false);
  int saved = omp_get_max_threads();
  omp_set_num_threads(1);
  BneEnumeration narrow = enumerate_bne(mot.economy, StrategyClass::Full, false);
  omp_set_num_threads(saved);
  REQUIRE(wide.groups.size() == narrow.groups.size());
  for (std::size_t g = 0; g < wide.groups.size(); ++g) {
    CHECK(wide.groups[g].outcome == narrow.groups[g].outcome);
    CHECK(wide.groups[g].profile_count == narrow.groups[g].profile_count);
    CHECK(wide.groups[g].representatives == narrow.groups[g].representatives);
  }
#endif
}

TEST_CASE("the pruned scaled-EU scan never misses or invents an improvement") {
  // Soundness of the bound behind every sweep: pruned > threshold must
  // agree exactly with the unpruned comparison, for thresholds around and
  // far from the true value.
  Rng rng(3006);
  for (int trial = 0; trial < 40; ++trial) {
    Economy econ = testing::random_unique_stable_economy(rng, 3, 3);
    Engine engine(econ);
    EngineWorkspace ws;
    engine.init_workspace(ws);
    StrategyProfile profile;
    for (int w = 0; w < 3; ++w) {
      auto reports = enumerate_reports(engine.true_worker_lists()[w], 3, StrategyClass::Full);
      profile.reports.push_back(reports[rng.below(static_cast<int>(reports.size()))]);
    }
    engine.set_profile(ws, profile);
    for (int w = 0; w < 3; ++w) {
      std::int64_t exact = engine.scaled_eu(ws, w);
      for (std::int64_t threshold :
           {exact - 7, exact - 1, exact, exact + 1, exact + 7, std::int64_t{0}}) {
        bool pruned_improves = engine.scaled_eu_pruned(ws, w, threshold) > threshold;
        CHECK(pruned_improves == (exact > threshold));
      }
    }
  }
}

TEST_CASE("uniqueness suites at unit scale") {
  // Small-N versions of the acceptance sweeps: economies satisfying either
  // sufficient condition admit exactly the stable outcome map.
  Rng rng(3007);
  for (int trial = 0; trial < 15; ++trial) {
    Economy assort = testing::random_firm_assortative_economy(rng, 3, 3);
    BneEnumeration full = enumerate_bne(assort, StrategyClass::Full, false);
    REQUIRE(full.groups.size() == 1);
    CHECK(full.groups[0].outcome.by_state == stable_outcome_map(assort));

    Economy star = testing::random_spc_star_economy(rng, 3, 3);
    BneEnumeration dropping = enumerate_bne(star, StrategyClass::Dropping, false);
    REQUIRE(dropping.groups.size() == 1);
    CHECK(dropping.groups[0].outcome.by_state == stable_outcome_map(star));
  }
}

TEST_CASE("per-worker deviation specs focus the verification") {
  ConstructionBundle mot = motivating_example();
  StrategyProfile bad = mot.profile("truthful").profile;
  bad.reports[0] = {2};  // w1 hides f2, which also hands w3 a deviation

  DeviationSpec nobody;
  nobody.per_worker = {std::nullopt, std::nullopt, std::nullopt};
  CHECK(verify_bne(mot.economy, bad, nobody).is_bne);  // nothing is examined

  DeviationSpec skip_w1;
  skip_w1.per_worker = {std::nullopt, StrategyClass::Full, StrategyClass::Full};
  EquilibriumReport focused = verify_bne(mot.economy, bad, skip_w1);
  CHECK_FALSE(focused.is_bne);
  REQUIRE(focused.witness.has_value());
  CHECK(focused.witness->worker != 0);  // w1's own deviations stay unexamined

  DeviationSpec only_w1;
  only_w1.per_worker = {StrategyClass::Full, std::nullopt, std::nullopt};
  EquilibriumReport w1_only = verify_bne(mot.economy, bad, only_w1);
  CHECK_FALSE(w1_only.is_bne);
  REQUIRE(w1_only.witness.has_value());
  CHECK(w1_only.witness->worker == 0);
}

TEST_CASE("truthful play is a BNE whenever every state is uniquely stable") {
  Rng rng(3003);
  for (int trial = 0; trial < 60; ++trial) {
    Economy econ = testing::random_unique_stable_economy(rng, 1 + rng.below(3),
                                                         1 + rng.below(3));
    EquilibriumReport report = is_bne(econ, truthful_profile(econ), StrategyClass::Full);
    CHECK(report.is_bne);
    CHECK(play(econ, truthful_profile(econ)).by_state == stable_outcome_map(econ));
  }
}

TEST_CASE("every enumerated BNE outcome matches all per-state top-top pairs") {
  Rng rng(3004);
  for (int trial = 0; trial < 25; ++trial) {
    Economy econ = testing::random_unique_stable_economy(rng, 2 + rng.below(2),
                                                         2 + rng.below(2));
    BneEnumeration result = enumerate_bne(econ, StrategyClass::Full, false);
    for (const BneGroup& group : result.groups)
      CHECK(verify_top_top_matched(econ, group.outcome));
  }
}

TEST_CASE("a one-pair economy has exactly one BNE outcome") {
  Economy econ;
  econ.beliefs = {Rat(1)};
  econ.firm_utils = {{{Rat(1)}}};
  econ.worker_utils = {{Rat(1)}};
  BneEnumeration result = enumerate_bne(econ, StrategyClass::Full, true);
  REQUIRE(result.groups.size() == 1);
  CHECK(result.groups[0].outcome.by_state[0].firm_to_worker == std::vector<int>{0});
}
