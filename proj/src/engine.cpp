#include "matchlab/engine.hpp"

#include <cstdlib>
#include <cstring>
#include <numeric>
#include <stdexcept>

#include "matchlab/errors.hpp"

namespace matchlab {

namespace {
constexpr int kMaxAgents = 120;  // int8 indexing, ranks < 0xFF
}

Engine::Engine(const Economy& economy)
    : num_states_(economy.num_states()), m_(economy.num_firms()), n_(economy.num_workers()) {
  if (m_ > kMaxAgents || n_ > kMaxAgents)
    throw SizeBoundExceeded("engine: market too large for int8 indexing");

  firm_list_.assign(static_cast<std::size_t>(num_states_) * m_ * n_, -1);
  firm_len_.assign(static_cast<std::size_t>(num_states_) * m_, 0);
  for (int s = 0; s < num_states_; ++s) {
    OrdinalPreferences prefs = utilities_to_ordinal(economy.market_for(s));
    for (int f = 0; f < m_; ++f) {
      const auto& list = prefs.firm_lists[f];
      firm_len_[static_cast<std::size_t>(s) * m_ + f] = static_cast<std::int8_t>(list.size());
      for (std::size_t t = 0; t < list.size(); ++t)
        firm_list_[(static_cast<std::size_t>(s) * m_ + f) * n_ + t] =
            static_cast<std::int8_t>(list[t]);
    }
    if (s == 0) true_worker_lists_ = prefs.worker_lists;
  }

  // Common denominator of all belief-weighted utilities.
  std::int64_t denom = 1;
  auto fold = [&](const Rat& r) {
    std::int64_t d = r.denominator();
    std::int64_t g = std::gcd(denom, d);
    if (denom > INT64_MAX / (d / g)) throw std::overflow_error("engine: utility scale overflow");
    denom = denom / g * d;
  };
  for (int s = 0; s < num_states_; ++s) {
    for (int f = 0; f < m_; ++f)
      for (int w = 0; w < n_; ++w) fold(economy.beliefs[s] * economy.worker_utils[f][w]);
  }
  scale_ = Rat(denom);

  util_.assign(static_cast<std::size_t>(num_states_) * n_ * m_, 0);
  suffix_max_.assign(static_cast<std::size_t>(num_states_) * n_, 0);
  for (int s = 0; s < num_states_; ++s)
    for (int w = 0; w < n_; ++w)
      for (int f = 0; f < m_; ++f) {
        Rat scaled = economy.beliefs[s] * economy.worker_utils[f][w] * scale_;
        if (scaled.denominator() != 1) throw std::logic_error("engine: scaling failed");
        if (std::abs(scaled.numerator()) > (INT64_MAX / 2) / std::max(1, num_states_))
          throw std::overflow_error("engine: scaled utility too large");
        util_[(static_cast<std::size_t>(s) * n_ + w) * m_ + f] = scaled.numerator();
      }
  for (int w = 0; w < n_; ++w) {
    std::int64_t acc = 0;
    for (int s = num_states_ - 1; s >= 0; --s) {
      std::int64_t best = 0;  // unmatched is always available
      for (int f = 0; f < m_; ++f)
        best = std::max(best, util_[(static_cast<std::size_t>(s) * n_ + w) * m_ + f]);
      acc += best;
      suffix_max_[static_cast<std::size_t>(s) * n_ + w] = acc;
    }
  }
}

void Engine::init_workspace(EngineWorkspace& ws) const {
  ws.wrank.assign(static_cast<std::size_t>(n_) * m_, 0xFF);
  ws.held.assign(n_, -1);
  ws.held_rank.assign(n_, 0xFF);
  ws.next.assign(m_, 0);
  ws.stack.assign(m_, 0);
}

void Engine::set_profile(EngineWorkspace& ws, const StrategyProfile& profile) const {
  std::memset(ws.wrank.data(), 0xFF, ws.wrank.size());
  for (int w = 0; w < n_; ++w) {
    const auto& report = profile.reports[w];
    for (std::size_t pos = 0; pos < report.size(); ++pos)
      ws.wrank[static_cast<std::size_t>(w) * m_ + report[pos]] = static_cast<std::uint8_t>(pos);
  }
}

void Engine::set_report(EngineWorkspace& ws, int worker, const std::vector<int>& report) const {
  std::uint8_t* row = ws.wrank.data() + static_cast<std::size_t>(worker) * m_;
  std::memset(row, 0xFF, m_);
  for (std::size_t pos = 0; pos < report.size(); ++pos)
    row[report[pos]] = static_cast<std::uint8_t>(pos);
}

void Engine::play_state(EngineWorkspace& ws, int state) const {
  const std::int8_t* lists = firm_list_.data() + static_cast<std::size_t>(state) * m_ * n_;
  const std::int8_t* lens = firm_len_.data() + static_cast<std::size_t>(state) * m_;
  const std::uint8_t* wrank = ws.wrank.data();
  std::int8_t* held = ws.held.data();
  std::uint8_t* held_rank = ws.held_rank.data();
  std::int8_t* next = ws.next.data();
  std::int8_t* stack = ws.stack.data();

  std::memset(held, 0xFF, n_);       // -1
  std::memset(held_rank, 0xFF, n_);  // free
  std::memset(next, 0, m_);
  int top = 0;
  for (int f = m_ - 1; f >= 0; --f) stack[top++] = static_cast<std::int8_t>(f);

  while (top > 0) {
    const int f = stack[--top];
    const std::int8_t* list = lists + static_cast<std::size_t>(f) * n_;
    const int len = lens[f];
    int pos = next[f];
    while (pos < len) {
      const int w = list[pos++];
      const std::uint8_t r = wrank[static_cast<std::size_t>(w) * m_ + f];
      // r < held_rank[w] covers both "listed and better" and "free slot".
      if (r < held_rank[w]) {
        const std::int8_t h = held[w];
        held[w] = static_cast<std::int8_t>(f);
        held_rank[w] = r;
        if (h >= 0) stack[top++] = h;
        break;
      }
    }
    next[f] = static_cast<std::int8_t>(pos);
  }
}

std::int64_t Engine::scaled_eu(EngineWorkspace& ws, int worker) const {
  std::int64_t eu = 0;
  for (int s = 0; s < num_states_; ++s) {
    play_state(ws, s);
    eu += scaled_util(s, worker, ws.held[worker]);
  }
  return eu;
}

std::int64_t Engine::scaled_eu_pruned(EngineWorkspace& ws, int worker,
                                      std::int64_t prune_above) const {
  std::int64_t eu = 0;
  for (int s = 0; s < num_states_; ++s) {
    if (eu + suffix_max(s, worker) <= prune_above) return prune_above;  // cannot exceed
    play_state(ws, s);
    eu += scaled_util(s, worker, ws.held[worker]);
  }
  return eu;
}

}  // namespace matchlab
