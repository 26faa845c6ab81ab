#pragma once

#include <cstdint>
#include <vector>

#include "matchlab/economy.hpp"
#include "matchlab/strategy.hpp"

namespace matchlab {

/// Scratch buffers for one thread's deferred-acceptance runs. No allocation
/// happens inside the hot loop. Ranks are stored as uint8 with 0xFF meaning
/// "unlisted" / "free", so acceptance tests are single unsigned compares.
struct EngineWorkspace {
  std::vector<std::uint8_t> wrank;     // [worker*m + firm], 0xFF = unlisted
  std::vector<std::int8_t> held;       // worker -> firm, -1 = free
  std::vector<std::uint8_t> held_rank; // rank of held firm, 0xFF = free
  std::vector<std::int8_t> next;       // firm -> next list position
  std::vector<std::int8_t> stack;      // free firms
};

/// Flattened, integer-scaled view of an economy for the sweep kernels.
/// Expected utilities are compared as exact int64 values: every
/// belief-weighted utility is multiplied by a common denominator, so the
/// order of scaled sums equals the order of the rational expected utilities.
class Engine {
 public:
  explicit Engine(const Economy& economy);

  int num_states() const { return num_states_; }
  int num_firms() const { return m_; }
  int num_workers() const { return n_; }
  const std::vector<std::vector<int>>& true_worker_lists() const { return true_worker_lists_; }

  void init_workspace(EngineWorkspace& ws) const;
  void set_profile(EngineWorkspace& ws, const StrategyProfile& profile) const;
  void set_report(EngineWorkspace& ws, int worker, const std::vector<int>& report) const;

  /// Firm-proposing DA in `state` against ws.wrank; fills ws.held.
  void play_state(EngineWorkspace& ws, int state) const;

  /// Scaled belief-weighted utility of matching `worker` with `firm` in
  /// `state` (firm = -1 means unmatched, value 0).
  std::int64_t scaled_util(int state, int worker, int firm) const {
    return firm < 0 ? 0 : util_[(static_cast<std::size_t>(state) * n_ + worker) * m_ + firm];
  }

  /// Largest scaled payoff `worker` can still collect from states >= `state`
  /// (never below zero; staying unmatched is always available).
  std::int64_t suffix_max(int state, int worker) const {
    return suffix_max_[static_cast<std::size_t>(state) * n_ + worker];
  }

  /// Plays every state for the current wrank and returns the scaled EU of
  /// `worker`. The pruned variant returns a value <= prune_above as soon as
  /// the remaining states cannot push the total beyond it.
  std::int64_t scaled_eu(EngineWorkspace& ws, int worker) const;
  std::int64_t scaled_eu_pruned(EngineWorkspace& ws, int worker, std::int64_t prune_above) const;

  /// Exact rational EU equals scaled EU divided by this factor.
  Rat scale_factor() const { return scale_; }

 private:
  int num_states_, m_, n_;
  std::vector<std::int8_t> firm_list_;   // [state][firm][pos], stride n_
  std::vector<std::int8_t> firm_len_;    // [state][firm]
  std::vector<std::int64_t> util_;       // [state][worker][firm]
  std::vector<std::int64_t> suffix_max_; // [state][worker]
  std::vector<std::vector<int>> true_worker_lists_;
  Rat scale_;
};

}  // namespace matchlab
