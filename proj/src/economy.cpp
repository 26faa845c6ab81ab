#include "matchlab/economy.hpp"

#include <algorithm>
#include <climits>
#include <numeric>
#include <set>

#include "matchlab/errors.hpp"

namespace matchlab {

Market Economy::market_for(int state) const {
  Market m;
  m.num_firms = num_firms();
  m.num_workers = num_workers();
  m.firm_utils = firm_utils.at(state);
  m.worker_utils = worker_utils;
  return m;
}

void Economy::validate(bool require_unique_stable) const {
  if (beliefs.empty()) throw SchemaError("economy needs at least one state");
  if (static_cast<int>(firm_utils.size()) != num_states())
    throw SchemaError("economy: one firm-utility matrix per state expected");
  Rat total(0);
  for (const Rat& p : beliefs) {
    if (p <= Rat(0)) throw SchemaError("economy: beliefs must have full support");
    total += p;
  }
  if (total != Rat(1)) throw SchemaError("economy: beliefs must sum to 1");
  for (int s = 0; s < num_states(); ++s) {
    Market m = market_for(s);
    m.validate();
    if (require_unique_stable && !is_unique_stable(utilities_to_ordinal(m)))
      throw SchemaError("economy: state " + std::to_string(s + 1) +
                        " does not have a unique stable matching");
  }
}

AgentNames AgentNames::default_for(int num_firms, int num_workers, int num_states) {
  AgentNames names;
  for (int i = 0; i < num_firms; ++i) names.firms.push_back("f" + std::to_string(i + 1));
  for (int j = 0; j < num_workers; ++j) names.workers.push_back("w" + std::to_string(j + 1));
  for (int s = 0; s < num_states; ++s) names.states.push_back(std::to_string(s + 1));
  return names;
}

std::vector<Matching> stable_outcome_map(const Economy& economy) {
  std::vector<Matching> out;
  for (int s = 0; s < economy.num_states(); ++s) {
    OrdinalPreferences prefs = utilities_to_ordinal(economy.market_for(s));
    if (!is_unique_stable(prefs))
      throw ConstructionError("stable_outcome_map: state " + std::to_string(s + 1) +
                              " is not uniquely stable");
    out.push_back(deferred_acceptance(prefs, Side::Firm));
  }
  return out;
}

std::vector<std::pair<int, int>> top_top_pairs(const OrdinalPreferences& prefs) {
  std::vector<std::pair<int, int>> out;
  for (int f = 0; f < prefs.num_firms(); ++f) {
    if (prefs.firm_lists[f].empty()) continue;
    int w = prefs.firm_lists[f][0];
    if (!prefs.worker_lists[w].empty() && prefs.worker_lists[w][0] == f) out.emplace_back(f, w);
  }
  return out;
}

namespace {

// Top-top pairs of the sub-market spanned by the still-active agents.
std::vector<std::pair<int, int>> active_top_top(const OrdinalPreferences& prefs,
                                                const std::vector<bool>& firm_active,
                                                const std::vector<bool>& worker_active) {
  std::vector<std::pair<int, int>> out;
  std::vector<int> best_firm(prefs.num_workers(), -1);
  for (int w = 0; w < prefs.num_workers(); ++w) {
    if (!worker_active[w]) continue;
    for (int f : prefs.worker_lists[w])
      if (firm_active[f]) {
        best_firm[w] = f;
        break;
      }
  }
  for (int f = 0; f < prefs.num_firms(); ++f) {
    if (!firm_active[f]) continue;
    for (int w : prefs.firm_lists[f]) {
      if (!worker_active[w]) continue;
      if (best_firm[w] == f) out.emplace_back(f, w);
      break;  // only f's favorite active worker matters
    }
  }
  return out;
}

void spc_rec(const OrdinalPreferences& prefs, std::vector<bool>& firm_active,
             std::vector<bool>& worker_active, int depth, int target,
             std::vector<std::pair<int, int>>& current, std::set<SpcOrdering>& out) {
  if (depth == target) {
    out.insert(SpcOrdering{current});
    return;
  }
  for (auto [f, w] : active_top_top(prefs, firm_active, worker_active)) {
    firm_active[f] = false;
    worker_active[w] = false;
    current.emplace_back(f, w);
    spc_rec(prefs, firm_active, worker_active, depth + 1, target, current, out);
    current.pop_back();
    firm_active[f] = true;
    worker_active[w] = true;
  }
}

}  // namespace

std::vector<SpcOrdering> check_spc(const Market& market) {
  OrdinalPreferences prefs = utilities_to_ordinal(market);
  const int target = std::min(prefs.num_firms(), prefs.num_workers());
  std::vector<bool> firm_active(prefs.num_firms(), true);
  std::vector<bool> worker_active(prefs.num_workers(), true);
  std::vector<std::pair<int, int>> current;
  std::set<SpcOrdering> out;
  spc_rec(prefs, firm_active, worker_active, 0, target, current, out);
  return {out.begin(), out.end()};
}

bool check_spc_economy(const Economy& economy) {
  for (int s = 0; s < economy.num_states(); ++s)
    if (check_spc(economy.market_for(s)).empty()) return false;
  return true;
}

SpcStarResult check_spc_star(const Economy& economy) {
  const int num_states = economy.num_states();
  std::vector<std::vector<SpcOrdering>> per_state;
  for (int s = 0; s < num_states; ++s) {
    auto orderings = check_spc(economy.market_for(s));
    if (orderings.empty())
      return {false, {}, "state " + std::to_string(s + 1) + " fails the SPC"};
    per_state.push_back(std::move(orderings));
  }

  std::vector<OrdinalPreferences> prefs;
  for (int s = 0; s < num_states; ++s) prefs.push_back(utilities_to_ordinal(economy.market_for(s)));

  const int m = economy.num_firms();
  // order_of[s][f] = order of f under the currently selected ordering in
  // state s, or INT_MAX when f has no order there.
  std::vector<std::vector<int>> order_of(num_states, std::vector<int>(m, INT_MAX));
  std::vector<int> choice(num_states, 0);

  auto fill_orders = [&](int s) {
    std::fill(order_of[s].begin(), order_of[s].end(), INT_MAX);
    const auto& pairs = per_state[s][choice[s]].pairs;
    for (int i = 0; i < static_cast<int>(pairs.size()); ++i) order_of[s][pairs[i].first] = i + 1;
  };

  auto selection_ok = [&]() {
    for (int s = 0; s < num_states; ++s) {
      const auto& pairs = per_state[s][choice[s]].pairs;
      for (int i = 0; i < static_cast<int>(pairs.size()); ++i) {
        auto [fi, wi] = pairs[i];
        for (int f : prefs[s].worker_lists[wi]) {
          if (f == fi) break;  // only firms strictly preferred to the partner
          for (int t = 0; t < num_states; ++t)
            if (order_of[t][f] >= i + 1) return false;
        }
      }
    }
    return true;
  };

  // Exhaustive search over one-ordering-per-state selections.
  while (true) {
    for (int s = 0; s < num_states; ++s) fill_orders(s);
    if (selection_ok()) {
      SpcStarResult result;
      result.satisfied = true;
      for (int s = 0; s < num_states; ++s) result.witness.push_back(per_state[s][choice[s]]);
      return result;
    }
    int s = 0;
    while (s < num_states && ++choice[s] == static_cast<int>(per_state[s].size())) {
      choice[s] = 0;
      ++s;
    }
    if (s == num_states) break;
  }
  return {false, {}, "no selection of per-state orderings meets the cross-state condition"};
}

bool check_assortative(const Market& market, Side side) {
  OrdinalPreferences prefs = utilities_to_ordinal(market);
  const auto& lists = side == Side::Firm ? prefs.firm_lists : prefs.worker_lists;
  for (std::size_t a = 1; a < lists.size(); ++a)
    if (lists[a] != lists[0]) return false;
  return true;
}

namespace {

struct CycleSearch {
  const std::vector<std::vector<int>>& frank;  // firm -> worker -> rank (-1 unlisted)
  const std::vector<std::vector<int>>& wrank;  // worker -> firm -> rank
  int max_k;
  std::vector<int> firms, workers;
  std::vector<bool> firm_used, worker_used;
  std::set<PreferenceCycle> out;

  // Ordinal comparison with partial lists: any listed partner beats any
  // unlisted one; two unlisted partners are incomparable.
  bool firm_prefers(int f, int a, int b) const {  // worker a over worker b
    return frank[f][a] != -1 && (frank[f][b] == -1 || frank[f][a] < frank[f][b]);
  }
  bool worker_prefers(int w, int a, int b) const {  // firm a over firm b
    return wrank[w][a] != -1 && (wrank[w][b] == -1 || wrank[w][a] < wrank[w][b]);
  }

  void emit() {
    // Canonical rotation: minimal firm first. The search already anchors on
    // the minimal firm, so the sequence is canonical as built.
    out.insert(PreferenceCycle{firms, workers});
  }

  void extend_with_firm() {
    const int k = static_cast<int>(firms.size());
    int last_worker = workers.back();
    // Close the cycle: f_1 must beat f_k for w_k, and w_1 must beat w_k for f_1.
    if (k >= 2 && worker_prefers(last_worker, firms[0], firms.back()) &&
        firm_prefers(firms[0], workers[0], last_worker))
      emit();
    if (k == max_k) return;
    for (int f = firms[0] + 1; f < static_cast<int>(frank.size()); ++f) {
      if (firm_used[f] || !worker_prefers(last_worker, f, firms.back())) continue;
      firm_used[f] = true;
      firms.push_back(f);
      extend_with_worker();
      firms.pop_back();
      firm_used[f] = false;
    }
  }

  void extend_with_worker() {
    int f = firms.back();
    for (int w = 0; w < static_cast<int>(wrank.size()); ++w) {
      if (worker_used[w]) continue;
      // For every firm after the first, the new worker must beat the previous one.
      if (firms.size() >= 2 && !firm_prefers(f, w, workers.back())) continue;
      if (frank[f][w] == -1) continue;
      worker_used[w] = true;
      workers.push_back(w);
      extend_with_firm();
      workers.pop_back();
      worker_used[w] = false;
    }
  }
};

}  // namespace

std::vector<PreferenceCycle> find_preference_cycles(const Market& market, int max_k) {
  OrdinalPreferences prefs = utilities_to_ordinal(market);
  const int m = prefs.num_firms();
  const int n = prefs.num_workers();
  if (max_k < 0) max_k = std::min(m, n);

  std::vector<std::vector<int>> frank(m, std::vector<int>(n, -1));
  std::vector<std::vector<int>> wrank(n, std::vector<int>(m, -1));
  for (int f = 0; f < m; ++f)
    for (std::size_t pos = 0; pos < prefs.firm_lists[f].size(); ++pos)
      frank[f][prefs.firm_lists[f][pos]] = static_cast<int>(pos);
  for (int w = 0; w < n; ++w)
    for (std::size_t pos = 0; pos < prefs.worker_lists[w].size(); ++pos)
      wrank[w][prefs.worker_lists[w][pos]] = static_cast<int>(pos);

  CycleSearch search{frank, wrank, max_k, {}, {}, std::vector<bool>(m, false),
                     std::vector<bool>(n, false), {}};
  // Anchor each search on the cycle's minimal firm; later firms must have a
  // larger index, which rules out rotated duplicates.
  for (int f0 = 0; f0 < m; ++f0) {
    search.firm_used[f0] = true;
    search.firms.push_back(f0);
    search.extend_with_worker();
    search.firms.pop_back();
    search.firm_used[f0] = false;
  }
  return {search.out.begin(), search.out.end()};
}

AugmentCheck validate_augmented(const Market& original, const Economy& economy,
                                const std::vector<int>& added_firms,
                                const std::vector<int>& added_workers) {
  AugmentCheck check;
  auto fail = [&](const std::string& why) {
    check.ok = false;
    check.failures.push_back(why);
  };

  std::vector<int> orig_firms, orig_workers;
  for (int f = 0; f < economy.num_firms(); ++f)
    if (std::find(added_firms.begin(), added_firms.end(), f) == added_firms.end())
      orig_firms.push_back(f);
  for (int w = 0; w < economy.num_workers(); ++w)
    if (std::find(added_workers.begin(), added_workers.end(), w) == added_workers.end())
      orig_workers.push_back(w);

  if (static_cast<int>(orig_firms.size()) != original.num_firms ||
      static_cast<int>(orig_workers.size()) != original.num_workers) {
    fail("agent counts do not line up with the original market");
    return check;
  }
  if (economy.num_states() != 2) fail("an augmented economy has exactly two states");

  // Clause 1: each state restricted to the original agents equals the original.
  for (int s = 0; s < economy.num_states(); ++s) {
    Market restricted = restrict_market(economy.market_for(s), orig_firms, orig_workers);
    if (restricted.firm_utils != original.firm_utils ||
        restricted.worker_utils != original.worker_utils) {
      fail("state " + std::to_string(s + 1) +
           " does not coincide with the original market on the original agents");
    }
  }

  // Clause 2: added workers' utilities are state-independent. This holds by
  // construction (worker utilities are shared across states); re-checked via
  // the economy's own consistency.
  if (static_cast<int>(economy.worker_utils.size()) != economy.num_firms())
    fail("worker utilities are malformed");

  // Clause 3: non-degenerate beliefs and unique stability per state.
  for (const Rat& p : economy.beliefs)
    if (p <= Rat(0) || p >= Rat(1)) {
      fail("beliefs are degenerate");
      break;
    }
  for (int s = 0; s < economy.num_states(); ++s) {
    if (!is_unique_stable(utilities_to_ordinal(economy.market_for(s))))
      fail("state " + std::to_string(s + 1) + " lacks a unique stable matching");
  }
  return check;
}

}  // namespace matchlab
