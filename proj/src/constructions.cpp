#include "matchlab/constructions.hpp"

#include <algorithm>
#include <numeric>

#include "matchlab/errors.hpp"

namespace matchlab {

namespace {

// 3x3 two-state block shared by motivating_example and append_block.
// Rows are firms, columns workers.
const std::vector<std::vector<std::vector<Rat>>> kBlockFirmUtils = {
    {{3, 1, 2}, {2, 3, 1}, {1, 2, 3}},   // state 1
    {{3, 1, 2}, {1, 3, 2}, {1, 2, 3}}};  // state 2 (middle firm swaps w1/w3)
const std::vector<std::vector<Rat>> kBlockWorkerUtils = {{2, 5, 2}, {5, 2, 5}, {1, 1, 1}};

struct BlockProfile {
  const char* name;
  std::vector<std::vector<int>> reports;          // per block worker
  std::vector<std::vector<int>> firm_to_worker;   // per state, -1 unmatched
};

const std::vector<BlockProfile> kBlockProfiles = {
    {"truthful", {{1, 0, 2}, {0, 1, 2}, {1, 0, 2}}, {{0, 1, 2}, {0, 1, 2}}},
    {"lambda1", {{1, 2}, {0, 1, 2}, {1, 2}}, {{1, 0, 2}, {1, 2, 0}}},
    {"lambda2", {{1, 2}, {0, 2, 1}, {1, 0, 2}}, {{2, 0, 1}, {1, 2, 0}}},
    {"lambda3", {{1, 2, 0}, {0, 1, 2}, {1}}, {{1, 0, -1}, {1, 2, 0}}},
};

// Utilities from an ordered list: best gets length, worst gets 1.
std::vector<Rat> utils_from_order(const std::vector<int>& order, int count) {
  std::vector<Rat> u(count);
  if (static_cast<int>(order.size()) != count)
    throw ConstructionError("preference list does not cover every partner");
  for (int pos = 0; pos < count; ++pos) u[order[pos]] = Rat(count - pos);
  return u;
}

OutcomeMap outcome_from_firm_maps(const std::vector<std::vector<int>>& maps, int num_workers) {
  OutcomeMap out;
  for (const auto& fw : maps) {
    Matching m = Matching::empty(static_cast<int>(fw.size()), num_workers);
    for (int f = 0; f < static_cast<int>(fw.size()); ++f)
      if (fw[f] != -1) m.link(f, fw[f]);
    out.by_state.push_back(std::move(m));
  }
  return out;
}

void check_beliefs(const Rat& p1) {
  if (p1 <= Rat(0) || p1 >= Rat(1))
    throw ConstructionError("state probability must lie strictly between 0 and 1");
}

// Shared self-verification: the economy is well formed and uniquely stable
// per state, the asserted inequalities hold, every bundled profile
// reproduces its expected outcome, and augmentations validate.
void finalize(ConstructionBundle& bundle, const OutcomeMap* expected_stable) {
  bundle.economy.validate(/*require_unique_stable=*/true);
  bundle.stable_map.by_state = stable_outcome_map(bundle.economy);
  if (expected_stable && bundle.stable_map != *expected_stable)
    throw ConstructionError(bundle.kind + ": stable outcome differs from the intended matching");
  for (const Constraint& c : bundle.constraints)
    if (!(c.lhs > c.rhs))
      throw ConstructionError(bundle.kind + ": constraint failed: " + c.description + " (" +
                              format_rational(c.lhs) + " > " + format_rational(c.rhs) + ")");
  for (const NamedProfile& np : bundle.profiles)
    if (play(bundle.economy, np.profile) != np.expected)
      throw ConstructionError(bundle.kind + ": profile '" + np.name +
                              "' does not reproduce its expected outcome");
  if (bundle.original.has_value()) {
    AugmentCheck check = validate_augmented(*bundle.original, bundle.economy, bundle.added_firms,
                                            bundle.added_workers);
    if (!check.ok)
      throw ConstructionError(bundle.kind + ": augmentation check failed: " + check.failures[0]);
  }
}

}  // namespace

const NamedProfile& ConstructionBundle::profile(const std::string& name) const {
  for (const NamedProfile& np : profiles)
    if (np.name == name) return np;
  throw std::invalid_argument("bundle has no profile named '" + name + "'");
}

ConstructionBundle motivating_example(const Rat& p1) {
  check_beliefs(p1);
  ConstructionBundle bundle;
  bundle.kind = "motivating";
  bundle.economy.beliefs = {p1, Rat(1) - p1};
  bundle.economy.firm_utils = kBlockFirmUtils;
  bundle.economy.worker_utils = kBlockWorkerUtils;
  bundle.names = AgentNames::default_for(3, 3, 2);

  for (const BlockProfile& bp : kBlockProfiles)
    bundle.profiles.push_back(
        {bp.name, StrategyProfile{bp.reports}, outcome_from_firm_maps(bp.firm_to_worker, 3)});

  // Readable as an augmentation of the outer 2x2 market with the middle pair.
  bundle.original = restrict_market(bundle.economy.market_for(0), {0, 2}, {0, 2});
  bundle.added_firms = {1};
  bundle.added_workers = {1};

  OutcomeMap mu = bundle.profiles[0].expected;
  finalize(bundle, &mu);
  return bundle;
}

ConstructionBundle example2(int n, const Rat& p1) {
  if (n < 3) throw ConstructionError("example2 needs n >= 3");
  check_beliefs(p1);
  const int m = n + 1;          // firms: f1..fn plus f (index n)
  const int added_f = n, added_w = n;
  const Rat p2 = Rat(1) - p1;

  ConstructionBundle bundle;
  bundle.kind = "example2";
  bundle.economy.beliefs = {p1, p2};

  // Base n x n market, fixed across states (the augmentation must restrict
  // back to it exactly). f_i: w_i > ... > w_n > w_{i-1} > ... > w_1;
  // w_i: f_{i-1} > ... > f_1 > f_i > ... > f_n.
  std::vector<std::vector<Rat>> base_fu(n, std::vector<Rat>(n));
  std::vector<std::vector<Rat>> base_wu(n, std::vector<Rat>(n));
  for (int h = 0; h < n; ++h) {
    std::vector<int> order;
    for (int j = h; j < n; ++j) order.push_back(j);
    for (int j = h - 1; j >= 0; --j) order.push_back(j);
    base_fu[h] = utils_from_order(order, n);
  }
  for (int j = 0; j < n; ++j) {
    std::vector<int> order;
    for (int h = j - 1; h >= 0; --h) order.push_back(h);
    for (int h = j; h < n; ++h) order.push_back(h);
    std::vector<Rat> u = utils_from_order(order, n);
    for (int h = 0; h < n; ++h) base_wu[h][j] = u[h];
  }

  // Worker lists over the augmented firm set, state independent.
  std::vector<std::vector<int>> worker_order(m);
  for (int j = 0; j < n; ++j) {
    auto& order = worker_order[j];
    for (int h = j - 1; h >= 0; --h) order.push_back(h);
    order.push_back(added_f);  // f sits right above f_i (below f_1 when i > 1)
    for (int h = j; h < n; ++h) order.push_back(h);
  }
  // w: f_{n-1} > f > f_n > f_1, ..., f_{n-2}.
  worker_order[added_w] = {n - 2, added_f, n - 1};
  for (int h = 0; h <= n - 3; ++h) worker_order[added_w].push_back(h);

  // Worker utilities: original columns keep their base values; the added
  // firm's entry is slotted strictly between its list neighbours. The added
  // worker's column is fresh, with the "sufficiently high" payoff from
  // f_{n-1} chosen so that the equilibrium inequality holds at this belief.
  bundle.economy.worker_utils.assign(m, std::vector<Rat>(m));
  for (int j = 0; j < n; ++j) {
    for (int h = 0; h < n; ++h) bundle.economy.worker_utils[h][j] = base_wu[h][j];
    if (j == 0) {
      bundle.economy.worker_utils[added_f][j] = base_wu[0][0] + Rat(1);  // above the whole list
    } else if (j == n - 1) {
      // "sufficiently close" to u(f_n): strictly between u(f_n) and both
      // u(f_1) and the candidate expected utility p1*u(f_n) + p2*u(f_{n-1}).
      Rat lo = base_wu[n - 1][j];
      Rat target = p1 * base_wu[n - 1][j] + p2 * base_wu[n - 2][j];
      Rat hi = std::min(target, base_wu[0][j]);
      bundle.economy.worker_utils[added_f][j] = (lo + hi) / Rat(2);
    } else {
      bundle.economy.worker_utils[added_f][j] =
          (base_wu[0][j] + base_wu[j][j]) / Rat(2);  // between f_1 and f_i
    }
  }
  {
    std::vector<Rat> u = utils_from_order(worker_order[added_w], m);
    for (int h = 0; h < m; ++h) bundle.economy.worker_utils[h][added_w] = u[h];
    // u(f_{n-1}) high enough that f_{n-1} in state 1 plus f_n in state 2
    // beats f for sure: p1*H + p2*u(f_n) > u(f).
    Rat bound = (u[added_f] - p2 * u[n - 1]) / p1;
    bundle.economy.worker_utils[n - 2][added_w] = std::max(Rat(10 * m), bound + Rat(1));
  }

  // Firm utilities: base rows stay fixed; only the added worker's entry can
  // vary with the state (that is the single source of uncertainty).
  for (int s = 0; s < 2; ++s) {
    std::vector<std::vector<Rat>> futils(m, std::vector<Rat>(m));
    for (int h = 0; h < n; ++h) {
      for (int j = 0; j < n; ++j) futils[h][j] = base_fu[h][j];
      if (h == n - 2) {
        // f_{n-1}: w between w_{n-1} and w_n (state 1), between w_n and
        // w_{n-2} (state 2).
        futils[h][added_w] = s == 0 ? (base_fu[h][n - 2] + base_fu[h][n - 1]) / Rat(2)
                                    : (base_fu[h][n - 1] + base_fu[h][n - 3]) / Rat(2);
      } else {
        futils[h][added_w] = *std::min_element(base_fu[h].begin(), base_fu[h].end()) / Rat(2);
      }
    }
    // f: w > w_n > w_1 > w_2, ..., w_{n-1}.
    std::vector<int> order = {added_w, n - 1, 0};
    for (int j = 1; j <= n - 2; ++j) order.push_back(j);
    futils[added_f] = utils_from_order(order, m);
    bundle.economy.firm_utils.push_back(std::move(futils));
  }

  bundle.names = AgentNames::default_for(n, n, 2);
  bundle.names.firms.push_back("f");
  bundle.names.workers.push_back("w");

  // Candidate: w and w_n drop f, everyone else truthful.
  StrategyProfile candidate;
  candidate.reports = worker_order;
  auto drop = [](std::vector<int>& report, int firm) {
    report.erase(std::remove(report.begin(), report.end(), firm), report.end());
  };
  drop(candidate.reports[n - 1], added_f);
  drop(candidate.reports[added_w], added_f);

  std::vector<std::vector<int>> lambda(2, std::vector<int>(m, -1));
  for (int s = 0; s < 2; ++s) {
    lambda[s][added_f] = 0;                       // f - w_1
    for (int j = 1; j <= n - 2; ++j) lambda[s][j - 1] = j;  // f_{i-1} - w_i
  }
  lambda[0][n - 1] = n - 1;  // state 1: f_n - w_n, f_{n-1} - w
  lambda[0][n - 2] = added_w;
  lambda[1][n - 2] = n - 1;  // state 2: f_{n-1} - w_n, f_n - w
  lambda[1][n - 1] = added_w;

  std::vector<std::vector<int>> mu_map(2);
  for (int s = 0; s < 2; ++s) {
    mu_map[s].resize(m);
    std::iota(mu_map[s].begin(), mu_map[s].end(), 0);
  }
  OutcomeMap mu = outcome_from_firm_maps(mu_map, m);

  StrategyProfile truthful;
  truthful.reports = worker_order;
  bundle.profiles.push_back({"truthful", truthful, mu});
  bundle.profiles.push_back({"candidate", candidate, outcome_from_firm_maps(lambda, m)});

  const auto& wu = bundle.economy.worker_utils;
  bundle.constraints.push_back(
      {"w: EU of f_{n-1} in state 1 and f_n in state 2 beats f in both states",
       p1 * wu[n - 2][added_w] + p2 * wu[n - 1][added_w], wu[added_f][added_w]});
  bundle.constraints.push_back(
      {"w_n: EU of f_n in state 1 and f_{n-1} in state 2 beats f in both states",
       p1 * wu[n - 1][n - 1] + p2 * wu[n - 2][n - 1], wu[added_f][n - 1]});

  // The base market is the economy restricted to the original agents in
  // either state (the added pair's rows/columns are last).
  std::vector<int> originals(n);
  std::iota(originals.begin(), originals.end(), 0);
  bundle.original = restrict_market(bundle.economy.market_for(0), originals, originals);
  bundle.added_firms = {added_f};
  bundle.added_workers = {added_w};

  finalize(bundle, &mu);
  return bundle;
}

ConstructionBundle prop4(int n, int k, const Rat& p1) {
  if (k < 1 || k > n - 2) throw ConstructionError("prop4 needs 1 <= k <= n-2");
  check_beliefs(p1);
  const int total = n + k;  // originals first, then F1..Fk / W1..Wk
  auto new_firm = [&](int i) { return n + i - 1; };    // 1-based i
  auto new_worker = [&](int i) { return n + i - 1; };  // 1-based i

  ConstructionBundle bundle;
  bundle.kind = "prop4";
  bundle.economy.beliefs = {p1, Rat(1) - p1};

  // Worker lists (state independent).
  std::vector<std::vector<int>> worker_order(total);
  for (int i = 1; i <= n; ++i) {
    auto& order = worker_order[i - 1];
    if (i <= k) {
      // All new firms on top, own partner F_i first.
      order.push_back(new_firm(i));
      for (int t = 1; t <= k; ++t)
        if (t != i) order.push_back(new_firm(t));
      for (int h = 0; h < n; ++h) order.push_back(h);
    } else if (i <= n - 1) {
      // New firms sit right above f_i.
      for (int h = 0; h < i - 1; ++h) order.push_back(h);
      for (int t = 1; t <= k; ++t) order.push_back(new_firm(t));
      for (int h = i - 1; h < n; ++h) order.push_back(h);
    } else {
      // w_n: F1 between f_{n-1} and f_n, other new firms last.
      for (int h = 0; h < n - 1; ++h) order.push_back(h);
      order.push_back(new_firm(1));
      order.push_back(n - 1);
      for (int t = 2; t <= k; ++t) order.push_back(new_firm(t));
    }
  }
  for (int i = 1; i <= k; ++i) {
    auto& order = worker_order[new_worker(i)];
    if (i == 1) {
      // W1: f_{n-1} > F1 > f_n > rest.
      order = {n - 2, new_firm(1), n - 1};
      for (int h = 0; h <= n - 3; ++h) order.push_back(h);
      for (int t = 2; t <= k; ++t) order.push_back(new_firm(t));
    } else {
      // W_i: f_{n-i} > F_i > rest.
      order = {n - i - 1, new_firm(i)};
      for (int h = 0; h < n; ++h)
        if (h != n - i - 1) order.push_back(h);
      for (int t = 1; t <= k; ++t)
        if (t != i) order.push_back(new_firm(t));
    }
  }

  // Doubly assortative base: every firm values w_j at n-j, every worker
  // values f_i at n-i (plus one, positions n..1). Fixed across states.
  const Rat p2 = Rat(1) - p1;
  auto base_firm_value = [&](int j) { return Rat(n - j); };    // 0-based worker j
  auto base_worker_value = [&](int h) { return Rat(n - h); };  // 0-based firm h

  // Descending values strictly below 1 for "least desirable" tails.
  auto below_one = [](int count, int slot) { return Rat(count - slot, count + 1); };

  bundle.economy.worker_utils.assign(total, std::vector<Rat>(total));
  for (int i = 1; i <= n; ++i) {
    const int j = i - 1;
    for (int h = 0; h < n; ++h) bundle.economy.worker_utils[h][j] = base_worker_value(h);
    if (i <= k) {
      // All new firms above the originals, F_i on top.
      bundle.economy.worker_utils[new_firm(i)][j] = Rat(n + k);
      int slot = 1;
      for (int t = 1; t <= k; ++t)
        if (t != i) bundle.economy.worker_utils[new_firm(t)][j] = Rat(n + k - slot++);
    } else if (i <= n - 1) {
      // New firms strictly between f_{i-1} and f_i.
      Rat lo = base_worker_value(i - 1), hi = base_worker_value(i - 2);
      for (int t = 1; t <= k; ++t)
        bundle.economy.worker_utils[new_firm(t)][j] = lo + (hi - lo) * Rat(k - t + 1, k + 1);
    } else {
      // w_n: F1 strictly between f_n and both f_{n-1} and the candidate
      // expected utility p1*u(f_n) + p2*u(f_{n-1}) ("sufficiently close").
      Rat lo = base_worker_value(n - 1);
      Rat target = p1 * base_worker_value(n - 1) + p2 * base_worker_value(n - 2);
      Rat hi = std::min(target, base_worker_value(n - 2));
      bundle.economy.worker_utils[new_firm(1)][j] = (lo + hi) / Rat(2);
      for (int t = 2; t <= k; ++t)
        bundle.economy.worker_utils[new_firm(t)][j] = below_one(k - 1, t - 2);
    }
  }
  for (int i = 1; i <= k; ++i) {
    std::vector<Rat> u = utils_from_order(worker_order[new_worker(i)], total);
    for (int h = 0; h < total; ++h) bundle.economy.worker_utils[h][new_worker(i)] = u[h];
    if (i == 1) {
      // "Sufficiently high": f_{n-1} in state 1 plus f_n in state 2 must
      // beat F1 for sure: p1*H + p2*u(f_n) > u(F1).
      Rat bound = (u[new_firm(1)] - p2 * u[n - 1]) / p1;
      bundle.economy.worker_utils[n - 2][new_worker(1)] =
          std::max(Rat(10 * total), bound + Rat(1));
    }
  }

  // Firm rows: the shared original ranking stays fixed; added workers slot
  // between w_{n-1} and w_n or into a below-one tail. Only f_{n-1}'s row
  // differs across the two states.
  for (int s = 0; s < 2; ++s) {
    std::vector<std::vector<Rat>> futils(total, std::vector<Rat>(total));
    for (int i = 1; i <= n; ++i) {
      const int h = i - 1;
      for (int j = 0; j < n; ++j) futils[h][j] = base_firm_value(j);
      const Rat mid = (base_firm_value(n - 2) + base_firm_value(n - 1)) / Rat(2);
      if (i == n - 1 && s == 0) {
        // State 1: W1 between w_{n-1} and w_n; other new workers last.
        futils[h][new_worker(1)] = mid;
        for (int t = 2; t <= k; ++t) futils[h][new_worker(t)] = below_one(k - 1, t - 2);
      } else if (i >= n - k && i <= n - 2) {
        // W_{n-i} between w_{n-1} and w_n; other new workers last.
        futils[h][new_worker(n - i)] = mid;
        int slot = 0;
        for (int t = 1; t <= k; ++t)
          if (t != n - i) futils[h][new_worker(t)] = below_one(k - 1, slot++);
      } else {
        // f_i (i <= n-k-1), f_n, and f_{n-1} in state 2: all new workers
        // last, W1 first among them.
        for (int t = 1; t <= k; ++t) futils[h][new_worker(t)] = below_one(k, t - 1);
      }
    }
    for (int i = 1; i <= k; ++i) {
      std::vector<int> order;
      if (i == 1) {
        // F1: W1 > w_n > w_1 > rest.
        order = {new_worker(1), n - 1, 0};
        for (int j = 1; j <= n - 2; ++j) order.push_back(j);
        for (int t = 2; t <= k; ++t) order.push_back(new_worker(t));
      } else {
        // F_i: W_i > w_i > rest.
        order = {new_worker(i), i - 1};
        for (int j = 0; j < n; ++j)
          if (j != i - 1) order.push_back(j);
        for (int t = 1; t <= k; ++t)
          if (t != i) order.push_back(new_worker(t));
      }
      futils[new_firm(i)] = utils_from_order(order, total);
    }
    bundle.economy.firm_utils.push_back(std::move(futils));
  }

  bundle.names = AgentNames::default_for(n, n, 2);
  for (int i = 1; i <= k; ++i) {
    bundle.names.firms.push_back("F" + std::to_string(i));
    bundle.names.workers.push_back("W" + std::to_string(i));
  }

  // Candidate: W1 and w_n drop F1; w_{n-1} drops f_{n-k}..f_{n-2}; rest truthful.
  StrategyProfile candidate;
  candidate.reports = worker_order;
  auto drop = [](std::vector<int>& report, int firm) {
    report.erase(std::remove(report.begin(), report.end(), firm), report.end());
  };
  drop(candidate.reports[new_worker(1)], new_firm(1));
  drop(candidate.reports[n - 1], new_firm(1));
  for (int h = n - k - 1; h <= n - 3; ++h) drop(candidate.reports[n - 2], h);

  std::vector<std::vector<int>> lambda(2, std::vector<int>(total, -1));
  for (int s = 0; s < 2; ++s) {
    for (int i = 2; i <= k; ++i) lambda[s][n - i - 1] = new_worker(i);  // f_{n-i} - W_i
    for (int i = 1; i <= k; ++i) lambda[s][new_firm(i)] = i - 1;       // F_i - w_i
    for (int i = k + 1; i <= n - 1; ++i) lambda[s][i - k - 1] = i - 1; // f_{i-k} - w_i
  }
  lambda[0][n - 2] = new_worker(1);  // state 1: f_{n-1} - W1, f_n - w_n
  lambda[0][n - 1] = n - 1;
  lambda[1][n - 2] = n - 1;          // state 2: f_{n-1} - w_n, f_n - W1
  lambda[1][n - 1] = new_worker(1);

  std::vector<std::vector<int>> mu_map(2);
  for (int s = 0; s < 2; ++s) {
    mu_map[s].resize(total);
    std::iota(mu_map[s].begin(), mu_map[s].end(), 0);
  }
  OutcomeMap mu = outcome_from_firm_maps(mu_map, total);

  StrategyProfile truthful;
  truthful.reports = worker_order;
  bundle.profiles.push_back({"truthful", truthful, mu});
  bundle.profiles.push_back({"candidate", candidate, outcome_from_firm_maps(lambda, total)});

  const auto& wu = bundle.economy.worker_utils;
  bundle.constraints.push_back(
      {"W1: EU of f_{n-1} in state 1 and f_n in state 2 beats F1 in both states",
       p1 * wu[n - 2][new_worker(1)] + p2 * wu[n - 1][new_worker(1)],
       wu[new_firm(1)][new_worker(1)]});
  bundle.constraints.push_back(
      {"w_n: EU of f_n in state 1 and f_{n-1} in state 2 beats F1 in both states",
       p1 * wu[n - 1][n - 1] + p2 * wu[n - 2][n - 1], wu[new_firm(1)][n - 1]});

  std::vector<int> originals(n);
  std::iota(originals.begin(), originals.end(), 0);
  bundle.original = restrict_market(bundle.economy.market_for(0), originals, originals);
  for (int i = 1; i <= k; ++i) {
    bundle.added_firms.push_back(new_firm(i));
    bundle.added_workers.push_back(new_worker(i));
  }

  finalize(bundle, &mu);

  // Candidate reports are dropping strategies; every worker's expected
  // payoff strictly beats the stable map's.
  const NamedProfile& cand = bundle.profile("candidate");
  for (int w = 0; w < total; ++w) {
    Rat stable_eu(0), cand_eu(0);
    for (int s = 0; s < 2; ++s) {
      int fs = bundle.stable_map.by_state[s].worker_to_firm[w];
      int fc = cand.expected.by_state[s].worker_to_firm[w];
      if (fs != -1) stable_eu += bundle.economy.beliefs[s] * wu[fs][w];
      if (fc != -1) cand_eu += bundle.economy.beliefs[s] * wu[fc][w];
    }
    if (!(cand_eu > stable_eu))
      throw ConstructionError("prop4: worker " + std::to_string(w + 1) +
                              " does not strictly gain under the candidate profile");
  }
  return bundle;
}

ConstructionBundle append_block(const Market& original, const Rat& p1) {
  original.validate();
  check_beliefs(p1);
  if (original.num_firms != original.num_workers)
    throw ConstructionError("append_block expects a balanced original market");
  if (!original.all_acceptable())
    throw ConstructionError("append_block expects a mutually acceptable original market");
  if (!is_unique_stable(utilities_to_ordinal(original)))
    throw ConstructionError("append_block expects a uniquely stable original market");

  const int n0 = original.num_firms;
  const int total = n0 + 3;

  ConstructionBundle bundle;
  bundle.kind = "append";
  bundle.economy.beliefs = {p1, Rat(1) - p1};

  // Cross-block utilities sit strictly below every same-block value and
  // decrease with the partner's index.
  auto row_min = [](const std::vector<Rat>& row) {
    return *std::min_element(row.begin(), row.end());
  };
  std::vector<Rat> firm_min(n0), worker_min(n0);
  for (int i = 0; i < n0; ++i) firm_min[i] = row_min(original.firm_utils[i]);
  for (int j = 0; j < n0; ++j) {
    Rat best = original.worker_utils[0][j];
    for (int i = 1; i < n0; ++i) best = std::min(best, original.worker_utils[i][j]);
    worker_min[j] = best;
  }

  for (int s = 0; s < 2; ++s) {
    std::vector<std::vector<Rat>> futils(total, std::vector<Rat>(total));
    for (int i = 0; i < n0; ++i) {
      for (int j = 0; j < n0; ++j) futils[i][j] = original.firm_utils[i][j];
      for (int t = 0; t < 3; ++t) futils[i][n0 + t] = firm_min[i] * Rat(3 - t, 4);
    }
    for (int t = 0; t < 3; ++t) {
      for (int j = 0; j < n0; ++j) futils[n0 + t][j] = Rat(n0 - j, n0 + 1);
      for (int q = 0; q < 3; ++q) futils[n0 + t][n0 + q] = kBlockFirmUtils[s][t][q];
    }
    bundle.economy.firm_utils.push_back(std::move(futils));
  }

  bundle.economy.worker_utils.assign(total, std::vector<Rat>(total));
  for (int j = 0; j < n0; ++j) {
    for (int i = 0; i < n0; ++i) bundle.economy.worker_utils[i][j] = original.worker_utils[i][j];
    for (int t = 0; t < 3; ++t)
      bundle.economy.worker_utils[n0 + t][j] = worker_min[j] * Rat(3 - t, 4);
  }
  for (int t = 0; t < 3; ++t) {
    for (int i = 0; i < n0; ++i) bundle.economy.worker_utils[i][n0 + t] = Rat(n0 - i, n0 + 1);
    for (int q = 0; q < 3; ++q)
      bundle.economy.worker_utils[n0 + q][n0 + t] = kBlockWorkerUtils[q][t];
  }

  bundle.names = AgentNames::default_for(n0, n0, 2);
  for (int t = 1; t <= 3; ++t) {
    bundle.names.firms.push_back("af" + std::to_string(t));
    bundle.names.workers.push_back("aw" + std::to_string(t));
  }

  // Original stable pairs stay put; the block plays out the bundled profile.
  Matching original_stable = deferred_acceptance(utilities_to_ordinal(original), Side::Firm);
  std::vector<std::vector<int>> truthful_reports =
      utilities_to_ordinal(bundle.economy.market_for(0)).worker_lists;

  for (const BlockProfile& bp : kBlockProfiles) {
    StrategyProfile profile;
    profile.reports = truthful_reports;
    for (int t = 0; t < 3; ++t) {
      profile.reports[n0 + t].clear();
      for (int f : bp.reports[t]) profile.reports[n0 + t].push_back(n0 + f);
    }
    std::vector<std::vector<int>> maps(2, std::vector<int>(total, -1));
    for (int s = 0; s < 2; ++s) {
      for (int i = 0; i < n0; ++i) maps[s][i] = original_stable.firm_to_worker[i];
      for (int t = 0; t < 3; ++t) {
        int w = bp.firm_to_worker[s][t];
        maps[s][n0 + t] = w == -1 ? -1 : n0 + w;
      }
    }
    bundle.profiles.push_back({bp.name, profile, outcome_from_firm_maps(maps, total)});
  }

  bundle.original = original;
  for (int t = 0; t < 3; ++t) {
    bundle.added_firms.push_back(n0 + t);
    bundle.added_workers.push_back(n0 + t);
  }

  OutcomeMap mu = bundle.profiles[0].expected;
  finalize(bundle, &mu);
  return bundle;
}

}  // namespace matchlab
