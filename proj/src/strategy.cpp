#include "matchlab/strategy.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <stdexcept>

#include "matchlab/engine.hpp"
#include "matchlab/errors.hpp"

namespace matchlab {

namespace {

constexpr std::uint64_t kScanBlock = 1u << 20;
constexpr std::uint64_t kMaterializeCap = 1u << 22;

void validate_report(const std::vector<int>& report, int num_firms) {
  std::vector<bool> seen(num_firms, false);
  for (int f : report) {
    if (f < 0 || f >= num_firms) throw SchemaError("report names an unknown firm");
    if (seen[f]) throw SchemaError("report lists a firm twice");
    seen[f] = true;
  }
}

void validate_profile(const StrategyProfile& profile, const Economy& economy) {
  if (static_cast<int>(profile.reports.size()) != economy.num_workers())
    throw SchemaError("profile must cover every worker exactly once");
  for (const auto& report : profile.reports) validate_report(report, economy.num_firms());
}

}  // namespace

ReportSpace::ReportSpace(std::vector<int> true_list, int num_firms, StrategyClass cls)
    : true_list_(std::move(true_list)), num_firms_(num_firms), cls_(cls) {
  const std::uint64_t len = true_list_.size();
  switch (cls_) {
    case StrategyClass::Truthful:
      size_ = 1;
      break;
    case StrategyClass::Truncation:
      size_ = len + 1;
      break;
    case StrategyClass::Dropping:
      if (len >= 63) throw SizeBoundExceeded("dropping space too large");
      size_ = 1ULL << len;
      break;
    case StrategyClass::Full: {
      if (num_firms_ > 20) throw SizeBoundExceeded("full report space too large");
      cum_.assign(num_firms_ + 2, 0);
      std::uint64_t perms = 1;  // P(m, k)
      for (int k = 0; k <= num_firms_; ++k) {
        cum_[k + 1] = cum_[k] + perms;
        perms *= static_cast<std::uint64_t>(num_firms_ - k);
      }
      size_ = cum_[num_firms_ + 1];
      perm_block_.resize(num_firms_ + 1);
      for (int k = 0; k <= num_firms_; ++k) {
        perm_block_[k].resize(k);
        for (int t = 0; t < k; ++t) {
          std::uint64_t block = 1;
          for (int q = 0; q < k - 1 - t; ++q)
            block *= static_cast<std::uint64_t>(num_firms_ - 1 - t - q);
          perm_block_[k][t] = block;
        }
      }
      break;
    }
  }
}

void ReportSpace::report(std::uint64_t index, std::vector<int>& out) const {
  out.clear();
  switch (cls_) {
    case StrategyClass::Truthful:
      out = true_list_;
      return;
    case StrategyClass::Truncation:
      out.assign(true_list_.begin(), true_list_.begin() + index);
      return;
    case StrategyClass::Dropping:
      for (std::size_t t = 0; t < true_list_.size(); ++t)
        if (index >> t & 1) out.push_back(true_list_[t]);
      return;
    case StrategyClass::Full: {
      int k = 0;
      while (index >= cum_[k + 1]) ++k;
      std::uint64_t rest = index - cum_[k];
      int avail[20];
      for (int f = 0; f < num_firms_; ++f) avail[f] = f;
      int left = num_firms_;
      const std::uint64_t* blocks = perm_block_[k].data();
      for (int t = 0; t < k; ++t) {
        // lexicographic k-permutation unranking
        int pick = static_cast<int>(rest / blocks[t]);
        rest %= blocks[t];
        out.push_back(avail[pick]);
        for (int q = pick; q + 1 < left; ++q) avail[q] = avail[q + 1];
        --left;
      }
      return;
    }
  }
}

std::vector<int> ReportSpace::report(std::uint64_t index) const {
  std::vector<int> out;
  report(index, out);
  return out;
}

ReportCursor::ReportCursor(const ReportSpace& space) : space_(&space) {
  if (space_->cls_ == StrategyClass::Full) {
    const int m = space_->num_firms_;
    digits_.assign(m, 0);
    avail_.assign(static_cast<std::size_t>(m + 1) * m, 0);
    report_.reserve(m);
  }
  seek(0);
}

void ReportCursor::seek(std::uint64_t index) {
  index_ = index;
  if (index >= space_->size()) return;
  if (space_->cls_ != StrategyClass::Full) {
    space_->report(index, report_);
    return;
  }
  const int m = space_->num_firms_;
  length_ = 0;
  while (index >= space_->cum_[length_ + 1]) ++length_;
  std::uint64_t rest = index - space_->cum_[length_];
  const std::uint64_t* blocks = space_->perm_block_[length_].data();
  for (int t = 0; t < length_; ++t) {
    digits_[t] = static_cast<int>(rest / blocks[t]);
    rest %= blocks[t];
  }
  for (int f = 0; f < m; ++f) avail_[f] = f;
  rebuild_from(0);
}

// Recomputes report_[level..] and the availability chain below `level`,
// assuming avail_ rows 0..level and digits_ are current.
void ReportCursor::rebuild_from(int level) {
  const int m = space_->num_firms_;
  report_.resize(length_);
  for (int t = level; t < length_; ++t) {
    const int* row = avail_.data() + static_cast<std::size_t>(t) * m;
    int* next_row = avail_.data() + static_cast<std::size_t>(t + 1) * m;
    const int left = m - t;
    report_[t] = row[digits_[t]];
    for (int q = 0, p = 0; q < left; ++q)
      if (q != digits_[t]) next_row[p++] = row[q];
  }
}

bool ReportCursor::advance() {
  ++index_;
  if (index_ >= space_->size()) return false;
  if (space_->cls_ != StrategyClass::Full) {
    space_->report(index_, report_);
    return true;
  }
  const int m = space_->num_firms_;
  int t = length_ - 1;
  while (t >= 0 && digits_[t] == m - t - 1) --t;
  if (t < 0) {
    // Next length bucket: the ascending prefix [0, 1, ..., length].
    ++length_;
    std::fill(digits_.begin(), digits_.begin() + length_, 0);
    rebuild_from(0);
    return true;
  }
  ++digits_[t];
  std::fill(digits_.begin() + t + 1, digits_.begin() + length_, 0);
  if (t == length_ - 1) {
    // Common case: only the last entry changes.
    report_[t] = avail_[static_cast<std::size_t>(t) * m + digits_[t]];
  } else {
    rebuild_from(t);
  }
  return true;
}

std::vector<std::vector<int>> enumerate_reports(const std::vector<int>& true_list, int num_firms,
                                                StrategyClass cls) {
  ReportSpace space(true_list, num_firms, cls);
  if (space.size() > kMaterializeCap)
    throw BudgetExceeded("report space too large to materialize");
  std::vector<std::vector<int>> out;
  out.reserve(space.size());
  for (std::uint64_t r = 0; r < space.size(); ++r) out.push_back(space.report(r));
  return out;
}

StrategyProfile truthful_profile(const Economy& economy) {
  // Worker lists are state-independent; state 0 is as good as any.
  StrategyProfile profile;
  profile.reports = utilities_to_ordinal(economy.market_for(0)).worker_lists;
  return profile;
}

OutcomeMap play(const Economy& economy, const StrategyProfile& profile) {
  validate_profile(profile, economy);
  OutcomeMap out;
  for (int s = 0; s < economy.num_states(); ++s) {
    OrdinalPreferences prefs = utilities_to_ordinal(economy.market_for(s));
    prefs.worker_lists = profile.reports;
    out.by_state.push_back(deferred_acceptance(prefs, Side::Firm));
  }
  return out;
}

Rat expected_utility(const Economy& economy, const StrategyProfile& profile, int worker) {
  OutcomeMap outcome = play(economy, profile);
  Rat eu(0);
  for (int s = 0; s < economy.num_states(); ++s) {
    int firm = outcome.by_state[s].worker_to_firm.at(worker);
    if (firm != -1) eu += economy.beliefs[s] * economy.worker_utils[firm][worker];
  }
  return eu;
}

bool is_weakly_undominated(const std::vector<int>& report, const std::vector<int>& true_list) {
  return !report.empty() && !true_list.empty() && report[0] == true_list[0];
}

bool is_dominated_exact(const std::vector<int>& report, int worker, const Economy& economy,
                        StrategyClass cls) {
  if (economy.num_firms() > 3 || economy.num_workers() > 3)
    throw SizeBoundExceeded("is_dominated_exact only runs at m, n <= 3");
  StrategyProfile truth = truthful_profile(economy);
  const int n = economy.num_workers();

  std::vector<std::vector<std::vector<int>>> others(n);
  for (int w = 0; w < n; ++w)
    if (w != worker) others[w] = enumerate_reports(truth.reports[w], economy.num_firms(), cls);
  auto alternatives = enumerate_reports(truth.reports[worker], economy.num_firms(), cls);

  // EU of `rep` against every opposing profile, in a fixed sweep order.
  auto payoffs = [&](const std::vector<int>& rep) {
    std::vector<Rat> out;
    StrategyProfile profile;
    profile.reports.assign(n, {});
    profile.reports[worker] = rep;
    std::vector<std::size_t> idx(n, 0);
    while (true) {
      for (int w = 0; w < n; ++w)
        if (w != worker) profile.reports[w] = others[w][idx[w]];
      out.push_back(expected_utility(economy, profile, worker));
      int w = n - 1;
      while (w >= 0 && (w == worker || ++idx[w] == others[w].size())) {
        if (w != worker) idx[w] = 0;
        --w;
      }
      if (w < 0) break;
    }
    return out;
  };

  const std::vector<Rat> base = payoffs(report);
  for (const auto& alt : alternatives) {
    if (alt == report) continue;
    std::vector<Rat> trial = payoffs(alt);
    bool weakly_better = true, strictly_somewhere = false;
    for (std::size_t t = 0; t < base.size(); ++t) {
      if (trial[t] < base[t]) {
        weakly_better = false;
        break;
      }
      if (trial[t] > base[t]) strictly_somewhere = true;
    }
    if (weakly_better && strictly_somewhere) return true;
  }
  return false;
}

namespace {

// Scans `space` for worker `j`'s deviations against the profile loaded in
// the workspaces. Returns the first index whose scaled EU strictly exceeds
// eu0, or UINT64_MAX. The parallel path processes fixed-size blocks with a
// min-index reduction, so the result does not depend on thread count.
std::uint64_t find_first_improving(const Engine& engine, const StrategyProfile& profile, int j,
                                   const ReportSpace& space, std::int64_t eu0, Execution exec) {
  const std::uint64_t total = space.size();
  if (exec == Execution::Serial) {
    EngineWorkspace ws;
    engine.init_workspace(ws);
    engine.set_profile(ws, profile);
    ReportCursor cursor(space);
    for (std::uint64_t r = 0; r < total; ++r) {
      engine.set_report(ws, j, cursor.current());
      if (engine.scaled_eu_pruned(ws, j, eu0) > eu0) return r;
      cursor.advance();
    }
    return UINT64_MAX;
  }

  constexpr std::uint64_t kChunk = 4096;
  for (std::uint64_t base = 0; base < total; base += kScanBlock) {
    const std::uint64_t end = std::min(total, base + kScanBlock);
    const std::int64_t chunks =
        static_cast<std::int64_t>((end - base + kChunk - 1) / kChunk);
    std::uint64_t found = UINT64_MAX;
#pragma omp parallel reduction(min : found)
    {
      EngineWorkspace ws;
      engine.init_workspace(ws);
      engine.set_profile(ws, profile);
      ReportCursor cursor(space);
#pragma omp for schedule(dynamic)
      for (std::int64_t c = 0; c < chunks; ++c) {
        const std::uint64_t lo = base + static_cast<std::uint64_t>(c) * kChunk;
        const std::uint64_t hi = std::min(end, lo + kChunk);
        cursor.seek(lo);
        for (std::uint64_t r = lo; r < hi; ++r) {
          engine.set_report(ws, j, cursor.current());
          if (engine.scaled_eu_pruned(ws, j, eu0) > eu0) {
            found = std::min(found, r);
            break;
          }
          cursor.advance();
        }
      }
    }
    if (found != UINT64_MAX) return found;
  }
  return UINT64_MAX;
}

}  // namespace

DeviationSpec DeviationSpec::uniform(int num_workers, StrategyClass cls) {
  DeviationSpec spec;
  spec.per_worker.assign(num_workers, cls);
  return spec;
}

EquilibriumReport verify_bne(const Economy& economy, const StrategyProfile& profile,
                             const DeviationSpec& spec, Execution exec) {
  validate_profile(profile, economy);
  if (static_cast<int>(spec.per_worker.size()) != economy.num_workers())
    throw SchemaError("deviation spec must cover every worker");

  Engine engine(economy);
  const int n = engine.num_workers();

  EquilibriumReport report;
  report.profile = profile;
  report.is_bne = true;
  report.unique_stable_reported = unique_stable_for_reported(economy, profile);

  EngineWorkspace ws;
  engine.init_workspace(ws);
  engine.set_profile(ws, profile);
  std::vector<std::int64_t> eu0(n, 0);
  for (int s = 0; s < engine.num_states(); ++s) {
    engine.play_state(ws, s);
    for (int w = 0; w < n; ++w) eu0[w] += engine.scaled_util(s, w, ws.held[w]);
  }
  for (int w = 0; w < n; ++w) {
    report.expected_utilities.push_back(Rat(eu0[w]) / engine.scale_factor());
    report.undominated.push_back(
        is_weakly_undominated(profile.reports[w], engine.true_worker_lists()[w]));
  }

  for (int w = 0; w < n && report.is_bne; ++w) {
    if (!spec.per_worker[w].has_value()) continue;
    ReportSpace space(engine.true_worker_lists()[w], engine.num_firms(), *spec.per_worker[w]);
    std::uint64_t hit = find_first_improving(engine, profile, w, space, eu0[w], exec);
    if (hit == UINT64_MAX) continue;
    report.is_bne = false;
    Deviation dev;
    dev.worker = w;
    dev.report = space.report(hit);
    StrategyProfile deviated = profile;
    deviated.reports[w] = dev.report;
    dev.eu_gain = expected_utility(economy, deviated, w) - Rat(eu0[w]) / engine.scale_factor();
    report.witness = std::move(dev);
  }
  return report;
}

EquilibriumReport is_bne(const Economy& economy, const StrategyProfile& profile,
                         StrategyClass cls, Execution exec) {
  return verify_bne(economy, profile, DeviationSpec::uniform(economy.num_workers(), cls), exec);
}

BestResponses best_responses(const Economy& economy, const StrategyProfile& profile, int worker,
                             StrategyClass cls, Execution exec) {
  validate_profile(profile, economy);
  Engine engine(economy);
  ReportSpace space(engine.true_worker_lists()[worker], engine.num_firms(), cls);
  const std::uint64_t total = space.size();

  std::int64_t best = INT64_MIN;
  if (exec == Execution::Serial) {
    EngineWorkspace ws;
    engine.init_workspace(ws);
    engine.set_profile(ws, profile);
    ReportCursor cursor(space);
    for (std::uint64_t r = 0; r < total; ++r) {
      engine.set_report(ws, worker, cursor.current());
      best = std::max(best, engine.scaled_eu(ws, worker));
      cursor.advance();
    }
  } else {
    constexpr std::uint64_t kChunk = 4096;
    const std::int64_t chunks = static_cast<std::int64_t>((total + kChunk - 1) / kChunk);
#pragma omp parallel reduction(max : best)
    {
      EngineWorkspace ws;
      engine.init_workspace(ws);
      engine.set_profile(ws, profile);
      ReportCursor cursor(space);
#pragma omp for schedule(dynamic)
      for (std::int64_t c = 0; c < chunks; ++c) {
        const std::uint64_t lo = static_cast<std::uint64_t>(c) * kChunk;
        const std::uint64_t hi = std::min(total, lo + kChunk);
        cursor.seek(lo);
        for (std::uint64_t r = lo; r < hi; ++r) {
          engine.set_report(ws, worker, cursor.current());
          best = std::max(best, engine.scaled_eu(ws, worker));
          cursor.advance();
        }
      }
    }
  }

  // Second pass: collect the argmax set in space order.
  BestResponses out;
  out.max_eu = Rat(best) / engine.scale_factor();
  EngineWorkspace ws;
  engine.init_workspace(ws);
  engine.set_profile(ws, profile);
  ReportCursor cursor(space);
  for (std::uint64_t r = 0; r < total; ++r) {
    engine.set_report(ws, worker, cursor.current());
    if (engine.scaled_eu(ws, worker) == best) out.reports.push_back(cursor.current());
    cursor.advance();
  }
  return out;
}

namespace {

struct CandidateGrid {
  std::vector<std::vector<std::vector<int>>> reports;  // per worker
  std::uint64_t total = 1;

  void profile_for(std::uint64_t index, StrategyProfile& out) const {
    const int n = static_cast<int>(reports.size());
    out.reports.resize(n);
    for (int w = n - 1; w >= 0; --w) {
      std::uint64_t k = reports[w].size();
      out.reports[w] = reports[w][index % k];
      index /= k;
    }
  }
};

}  // namespace

BneEnumeration enumerate_bne(const Economy& economy, StrategyClass cls, bool undominated_only,
                             std::uint64_t budget, Execution exec,
                             std::size_t max_representatives) {
  Engine engine(economy);
  const int n = engine.num_workers();
  const int num_states = engine.num_states();

  // The budget applies to the unfiltered class product.
  std::uint64_t unfiltered = 1;
  std::vector<ReportSpace> spaces;
  for (int w = 0; w < n; ++w) {
    spaces.emplace_back(engine.true_worker_lists()[w], engine.num_firms(), cls);
    if (unfiltered > budget / spaces.back().size())
      throw BudgetExceeded("profile sweep exceeds budget of " + std::to_string(budget) +
                           " profiles");
    unfiltered *= spaces.back().size();
  }

  CandidateGrid grid;
  grid.reports.resize(n);
  for (int w = 0; w < n; ++w) {
    if (spaces[w].size() > kMaterializeCap)
      throw BudgetExceeded("per-worker report space too large to materialize");
    std::vector<int> rep;
    for (std::uint64_t r = 0; r < spaces[w].size(); ++r) {
      spaces[w].report(r, rep);
      if (undominated_only && !is_weakly_undominated(rep, engine.true_worker_lists()[w])) continue;
      grid.reports[w].push_back(rep);
    }
    if (grid.reports[w].empty()) return {};  // no candidate profiles at all
    grid.total *= grid.reports[w].size();
  }

  struct Hit {
    std::uint64_t index;
    std::vector<std::int16_t> outcome;  // held arrays, state-major

    bool operator<(const Hit& other) const { return index < other.index; }
  };

  // One candidate: play it, then look for any strictly improving deviation
  // inside the full (unfiltered) class.
  auto evaluate = [&](std::uint64_t index, EngineWorkspace& ws, StrategyProfile& profile,
                      std::vector<std::int64_t>& eu0, std::vector<int>& rep,
                      std::vector<std::int16_t>& outcome) -> bool {
    grid.profile_for(index, profile);
    engine.set_profile(ws, profile);
    std::fill(eu0.begin(), eu0.end(), 0);
    outcome.clear();
    for (int s = 0; s < num_states; ++s) {
      engine.play_state(ws, s);
      for (int w = 0; w < n; ++w) eu0[w] += engine.scaled_util(s, w, ws.held[w]);
      outcome.insert(outcome.end(), ws.held.begin(), ws.held.end());
    }
    for (int w = 0; w < n; ++w) {
      for (std::uint64_t r = 0; r < spaces[w].size(); ++r) {
        spaces[w].report(r, rep);
        engine.set_report(ws, w, rep);
        if (engine.scaled_eu_pruned(ws, w, eu0[w]) > eu0[w]) {
          return false;  // profitable deviation
        }
      }
      engine.set_report(ws, w, profile.reports[w]);
    }
    return true;
  };

  std::vector<Hit> hits;
  if (exec == Execution::Serial) {
    EngineWorkspace ws;
    engine.init_workspace(ws);
    StrategyProfile profile;
    std::vector<std::int64_t> eu0(n);
    std::vector<int> rep;
    std::vector<std::int16_t> outcome;
    for (std::uint64_t index = 0; index < grid.total; ++index)
      if (evaluate(index, ws, profile, eu0, rep, outcome)) hits.push_back({index, outcome});
  } else {
#pragma omp parallel
    {
      EngineWorkspace ws;
      engine.init_workspace(ws);
      StrategyProfile profile;
      std::vector<std::int64_t> eu0(n);
      std::vector<int> rep;
      std::vector<std::int16_t> outcome;
      std::vector<Hit> local;
#pragma omp for schedule(dynamic, 64) nowait
      for (std::int64_t index = 0; index < static_cast<std::int64_t>(grid.total); ++index)
        if (evaluate(static_cast<std::uint64_t>(index), ws, profile, eu0, rep, outcome))
          local.push_back({static_cast<std::uint64_t>(index), outcome});
#pragma omp critical
      hits.insert(hits.end(), local.begin(), local.end());
    }
    std::sort(hits.begin(), hits.end());
  }

  BneEnumeration result;
  result.candidates_swept = grid.total;
  result.bne_count = hits.size();
  std::map<std::vector<std::int16_t>, std::size_t> group_of;
  StrategyProfile profile;
  for (const Hit& hit : hits) {
    auto [it, fresh] = group_of.try_emplace(hit.outcome, result.groups.size());
    if (fresh) {
      BneGroup group;
      for (int s = 0; s < num_states; ++s) {
        Matching m = Matching::empty(engine.num_firms(), n);
        for (int w = 0; w < n; ++w)
          if (hit.outcome[s * n + w] >= 0) m.link(hit.outcome[s * n + w], w);
        group.outcome.by_state.push_back(std::move(m));
      }
      result.groups.push_back(std::move(group));
    }
    BneGroup& group = result.groups[it->second];
    ++group.profile_count;
    if (group.representatives.size() < max_representatives) {
      grid.profile_for(hit.index, profile);
      group.representatives.push_back(profile);
    }
  }
  return result;
}

std::vector<bool> unique_stable_for_reported(const Economy& economy,
                                             const StrategyProfile& profile) {
  validate_profile(profile, economy);
  std::vector<bool> out;
  for (int s = 0; s < economy.num_states(); ++s) {
    OrdinalPreferences prefs = utilities_to_ordinal(economy.market_for(s));
    prefs.worker_lists = profile.reports;
    out.push_back(is_unique_stable(prefs));
  }
  return out;
}

bool verify_top_top_matched(const Economy& economy, const OutcomeMap& outcome) {
  if (static_cast<int>(outcome.by_state.size()) != economy.num_states())
    throw SchemaError("outcome map must cover every state");
  for (int s = 0; s < economy.num_states(); ++s) {
    OrdinalPreferences prefs = utilities_to_ordinal(economy.market_for(s));
    for (auto [f, w] : top_top_pairs(prefs))
      if (outcome.by_state[s].firm_to_worker[f] != w) return false;
  }
  return true;
}

OutcomeComparison compare_outcomes(const Economy& economy, const OutcomeMap& a,
                                   const OutcomeMap& b) {
  const int m = economy.num_firms();
  const int n = economy.num_workers();
  OutcomeComparison out;

  for (int f = 0; f < m; ++f) {
    bool a_better = false, b_better = false;
    for (int s = 0; s < economy.num_states(); ++s) {
      auto util = [&](const OutcomeMap& o) {
        int w = o.by_state[s].firm_to_worker[f];
        return w == -1 ? Rat(0) : economy.firm_utils[s][f][w];
      };
      Rat ua = util(a), ub = util(b);
      if (ua > ub) a_better = true;
      if (ub > ua) b_better = true;
    }
    if (a_better && b_better)
      out.firms.push_back(Verdict::Mixed);
    else if (a_better)
      out.firms.push_back(Verdict::PrefersA);
    else if (b_better)
      out.firms.push_back(Verdict::PrefersB);
    else
      out.firms.push_back(Verdict::Indifferent);
  }

  for (int w = 0; w < n; ++w) {
    auto eu = [&](const OutcomeMap& o) {
      Rat acc(0);
      for (int s = 0; s < economy.num_states(); ++s) {
        int f = o.by_state[s].worker_to_firm[w];
        if (f != -1) acc += economy.beliefs[s] * economy.worker_utils[f][w];
      }
      return acc;
    };
    Rat ea = eu(a), eb = eu(b);
    out.workers.push_back(ea > eb   ? Verdict::PrefersA
                          : eb > ea ? Verdict::PrefersB
                                    : Verdict::Indifferent);
  }
  return out;
}

RankStats rank_stats(const Economy& economy, const OutcomeMap& base, const OutcomeMap& alt,
                     const std::vector<AgentId>& subset, const OrdinalPreferences* ranking_prefs) {
  if (subset.empty()) throw SchemaError("rank_stats needs a nonempty agent subset");
  RankStats stats;
  for (int s = 0; s < economy.num_states(); ++s) {
    OrdinalPreferences state_prefs =
        ranking_prefs ? *ranking_prefs : utilities_to_ordinal(economy.market_for(s));
    Rat sum(0);
    for (AgentId agent : subset) {
      const auto& list = agent.side == Side::Firm ? state_prefs.firm_lists.at(agent.index)
                                                  : state_prefs.worker_lists.at(agent.index);
      auto rank_in = [&](const OutcomeMap& o) -> int {
        int partner = agent.side == Side::Firm ? o.by_state[s].firm_to_worker[agent.index]
                                               : o.by_state[s].worker_to_firm[agent.index];
        if (partner == -1) return static_cast<int>(list.size()) + 1;
        for (std::size_t pos = 0; pos < list.size(); ++pos)
          if (list[pos] == partner) return static_cast<int>(pos) + 1;
        throw std::invalid_argument("rank_stats: matched partner is not in the ranking list");
      };
      sum += Rat(rank_in(base) - rank_in(alt));
    }
    stats.avg_rank_diff.push_back(sum / Rat(static_cast<std::int64_t>(subset.size())));
  }
  return stats;
}

}  // namespace matchlab
