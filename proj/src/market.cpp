#include "matchlab/market.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <set>
#include <stdexcept>

#include "matchlab/errors.hpp"

namespace matchlab {

void Market::validate() const {
  if (num_firms < 1 || num_workers < 1)
    throw SchemaError("market must have at least one firm and one worker");
  auto check_dims = [&](const std::vector<std::vector<Rat>>& mat, const char* name) {
    if (static_cast<int>(mat.size()) != num_firms)
      throw SchemaError(std::string(name) + ": expected one row per firm");
    for (const auto& row : mat)
      if (static_cast<int>(row.size()) != num_workers)
        throw SchemaError(std::string(name) + ": expected one column per worker");
  };
  check_dims(firm_utils, "firm_utils");
  check_dims(worker_utils, "worker_utils");

  for (int i = 0; i < num_firms; ++i) {
    std::set<Rat> seen;
    for (int j = 0; j < num_workers; ++j) {
      const Rat& u = firm_utils[i][j];
      if (u == Rat(0))
        throw SchemaError("firm utility must be nonzero (firm " + std::to_string(i + 1) +
                          ", worker " + std::to_string(j + 1) + ")");
      if (!seen.insert(u).second)
        throw SchemaError("tied utilities in firm " + std::to_string(i + 1) + "'s row");
    }
  }
  for (int j = 0; j < num_workers; ++j) {
    std::set<Rat> seen;
    for (int i = 0; i < num_firms; ++i) {
      const Rat& u = worker_utils[i][j];
      if (u == Rat(0))
        throw SchemaError("worker utility must be nonzero (firm " + std::to_string(i + 1) +
                          ", worker " + std::to_string(j + 1) + ")");
      if (!seen.insert(u).second)
        throw SchemaError("tied utilities in worker " + std::to_string(j + 1) + "'s column");
    }
  }
}

bool Market::all_acceptable() const {
  for (const auto& row : firm_utils)
    for (const Rat& u : row)
      if (u <= Rat(0)) return false;
  for (const auto& row : worker_utils)
    for (const Rat& u : row)
      if (u <= Rat(0)) return false;
  return true;
}

Market restrict_market(const Market& market, const std::vector<int>& firms,
                       const std::vector<int>& workers) {
  Market sub;
  sub.num_firms = static_cast<int>(firms.size());
  sub.num_workers = static_cast<int>(workers.size());
  sub.firm_utils.resize(firms.size());
  sub.worker_utils.resize(firms.size());
  for (std::size_t a = 0; a < firms.size(); ++a) {
    for (std::size_t b = 0; b < workers.size(); ++b) {
      sub.firm_utils[a].push_back(market.firm_utils[firms[a]][workers[b]]);
      sub.worker_utils[a].push_back(market.worker_utils[firms[a]][workers[b]]);
    }
  }
  return sub;
}

Matching Matching::empty(int num_firms, int num_workers) {
  Matching m;
  m.firm_to_worker.assign(num_firms, -1);
  m.worker_to_firm.assign(num_workers, -1);
  return m;
}

Matching Matching::from_pairs(int num_firms, int num_workers,
                              const std::vector<std::pair<int, int>>& pairs) {
  Matching m = empty(num_firms, num_workers);
  for (auto [f, w] : pairs) m.link(f, w);
  return m;
}

void Matching::link(int firm, int worker) {
  if (firm_to_worker.at(firm) != -1 || worker_to_firm.at(worker) != -1)
    throw std::invalid_argument("matching link would break injectivity");
  firm_to_worker[firm] = worker;
  worker_to_firm[worker] = firm;
}

std::vector<std::pair<int, int>> Matching::pairs() const {
  std::vector<std::pair<int, int>> out;
  for (int f = 0; f < static_cast<int>(firm_to_worker.size()); ++f)
    if (firm_to_worker[f] != -1) out.emplace_back(f, firm_to_worker[f]);
  return out;
}

OrdinalPreferences utilities_to_ordinal(const Market& market) {
  market.validate();
  OrdinalPreferences prefs;
  prefs.firm_lists.resize(market.num_firms);
  prefs.worker_lists.resize(market.num_workers);
  for (int i = 0; i < market.num_firms; ++i) {
    for (int j = 0; j < market.num_workers; ++j)
      if (market.firm_utils[i][j] > Rat(0)) prefs.firm_lists[i].push_back(j);
    std::sort(prefs.firm_lists[i].begin(), prefs.firm_lists[i].end(),
              [&](int a, int b) { return market.firm_utils[i][a] > market.firm_utils[i][b]; });
  }
  for (int j = 0; j < market.num_workers; ++j) {
    for (int i = 0; i < market.num_firms; ++i)
      if (market.worker_utils[i][j] > Rat(0)) prefs.worker_lists[j].push_back(i);
    std::sort(prefs.worker_lists[j].begin(), prefs.worker_lists[j].end(),
              [&](int a, int b) { return market.worker_utils[a][j] > market.worker_utils[b][j]; });
  }
  return prefs;
}

namespace {

// rank[agent][partner] = 0-based list position, or -1 when unlisted.
std::vector<std::vector<int>> rank_table(const std::vector<std::vector<int>>& lists,
                                         int num_partners) {
  std::vector<std::vector<int>> rank(lists.size(), std::vector<int>(num_partners, -1));
  for (std::size_t a = 0; a < lists.size(); ++a)
    for (std::size_t pos = 0; pos < lists[a].size(); ++pos)
      rank[a][lists[a][pos]] = static_cast<int>(pos);
  return rank;
}

}  // namespace

Matching deferred_acceptance(const OrdinalPreferences& prefs, Side proposing,
                             ProposalSchedule schedule) {
  const bool firms_propose = proposing == Side::Firm;
  const auto& prop_lists = firms_propose ? prefs.firm_lists : prefs.worker_lists;
  const auto& recv_lists = firms_propose ? prefs.worker_lists : prefs.firm_lists;
  const int np = static_cast<int>(prop_lists.size());
  const int nr = static_cast<int>(recv_lists.size());

  const auto recv_rank = rank_table(recv_lists, np);

  std::vector<int> next(np, 0);        // next list position to propose to
  std::vector<int> held_by(nr, -1);    // receiver -> held proposer
  std::vector<int> match_of(np, -1);   // proposer -> receiver holding it

  std::deque<int> queue;
  for (int p = 0; p < np; ++p) queue.push_back(p);

  // One step: p proposes to its next listed receiver. Returns false once p's
  // list is exhausted.
  auto propose_once = [&](int p) {
    if (next[p] >= static_cast<int>(prop_lists[p].size())) return false;
    int r = prop_lists[p][next[p]++];
    if (recv_rank[r][p] == -1) return true;  // receiver does not list p
    int cur = held_by[r];
    if (cur == -1) {
      held_by[r] = p;
      match_of[p] = r;
    } else if (recv_rank[r][p] < recv_rank[r][cur]) {
      held_by[r] = p;
      match_of[p] = r;
      match_of[cur] = -1;
      queue.push_back(cur);
    }
    return true;
  };

  while (!queue.empty()) {
    int p = queue.front();
    queue.pop_front();
    if (match_of[p] != -1) continue;
    if (schedule == ProposalSchedule::OneAtATime) {
      while (match_of[p] == -1 && propose_once(p)) {
      }
    } else {
      if (propose_once(p) && match_of[p] == -1) queue.push_back(p);
    }
  }

  Matching out;
  if (firms_propose) {
    out.firm_to_worker = match_of;
    out.worker_to_firm = held_by;
  } else {
    out.firm_to_worker = held_by;
    out.worker_to_firm = match_of;
  }
  return out;
}

StabilityReport blocking_pairs(const Matching& matching, const OrdinalPreferences& prefs) {
  const int m = prefs.num_firms();
  const int n = prefs.num_workers();
  const auto frank = rank_table(prefs.firm_lists, n);
  const auto wrank = rank_table(prefs.worker_lists, m);

  StabilityReport report;
  for (int f = 0; f < m; ++f) {
    int w = matching.firm_to_worker[f];
    if (w != -1 && frank[f][w] == -1) report.irrational.push_back({Side::Firm, f});
  }
  for (int w = 0; w < n; ++w) {
    int f = matching.worker_to_firm[w];
    if (f != -1 && wrank[w][f] == -1) report.irrational.push_back({Side::Worker, w});
  }

  auto firm_prefers = [&](int f, int w) {
    if (frank[f][w] == -1) return false;
    int cur = matching.firm_to_worker[f];
    return cur == -1 || frank[f][cur] == -1 || frank[f][w] < frank[f][cur];
  };
  auto worker_prefers = [&](int w, int f) {
    if (wrank[w][f] == -1) return false;
    int cur = matching.worker_to_firm[w];
    return cur == -1 || wrank[w][cur] == -1 || wrank[w][f] < wrank[w][cur];
  };
  for (int f = 0; f < m; ++f)
    for (int w = 0; w < n; ++w)
      if (firm_prefers(f, w) && worker_prefers(w, f)) report.blocking.emplace_back(f, w);
  return report;
}

bool is_stable(const Matching& matching, const OrdinalPreferences& prefs) {
  StabilityReport report = blocking_pairs(matching, prefs);
  return report.blocking.empty() && report.irrational.empty();
}

namespace {

void enumerate_rec(const OrdinalPreferences& prefs,
                   const std::vector<std::vector<int>>& wrank, int firm,
                   Matching& current, std::vector<bool>& used,
                   std::vector<Matching>& out) {
  const int m = prefs.num_firms();
  if (firm == m) {
    if (blocking_pairs(current, prefs).blocking.empty()) out.push_back(current);
    return;
  }
  // unmatched
  enumerate_rec(prefs, wrank, firm + 1, current, used, out);
  // any mutually acceptable, unused worker (keeps candidates individually rational)
  for (int w : prefs.firm_lists[firm]) {
    if (used[w] || wrank[w][firm] == -1) continue;
    used[w] = true;
    current.firm_to_worker[firm] = w;
    current.worker_to_firm[w] = firm;
    enumerate_rec(prefs, wrank, firm + 1, current, used, out);
    current.firm_to_worker[firm] = -1;
    current.worker_to_firm[w] = -1;
    used[w] = false;
  }
}

}  // namespace

std::vector<Matching> enumerate_stable_matchings(const OrdinalPreferences& prefs,
                                                 int size_bound) {
  const int m = prefs.num_firms();
  const int n = prefs.num_workers();
  if (m > size_bound || n > size_bound)
    throw SizeBoundExceeded("enumerate_stable_matchings: market exceeds size bound " +
                            std::to_string(size_bound));
  const auto wrank = rank_table(prefs.worker_lists, m);
  std::vector<Matching> out;
  Matching current = Matching::empty(m, n);
  std::vector<bool> used(n, false);
  enumerate_rec(prefs, wrank, 0, current, used, out);
  std::sort(out.begin(), out.end());
  return out;
}

bool is_unique_stable(const OrdinalPreferences& prefs) {
  return deferred_acceptance(prefs, Side::Firm) == deferred_acceptance(prefs, Side::Worker);
}

std::optional<int> rank_of(AgentId agent, std::optional<int> partner,
                           const OrdinalPreferences& prefs) {
  if (!partner.has_value()) return std::nullopt;
  const auto& list =
      agent.side == Side::Firm ? prefs.firm_lists.at(agent.index) : prefs.worker_lists.at(agent.index);
  for (std::size_t pos = 0; pos < list.size(); ++pos)
    if (list[pos] == *partner) return static_cast<int>(pos) + 1;
  throw std::invalid_argument("rank_of: partner not listed");
}

std::set<AgentId> matched_set(const Matching& matching) {
  std::set<AgentId> out;
  for (int f = 0; f < static_cast<int>(matching.firm_to_worker.size()); ++f)
    if (matching.firm_to_worker[f] != -1) out.insert({Side::Firm, f});
  for (int w = 0; w < static_cast<int>(matching.worker_to_firm.size()); ++w)
    if (matching.worker_to_firm[w] != -1) out.insert({Side::Worker, w});
  return out;
}

}  // namespace matchlab
