#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "sqsd/belief.hpp"
#include "sqsd/counters.hpp"
#include "sqsd/planner.hpp"
#include "sqsd/rng.hpp"

namespace sqsd {

struct ObservationRecord {
  std::size_t stage = 0;
  std::size_t action = 0;
  std::size_t outcome = 0;
};

struct EpisodeTrace {
  std::size_t hidden = 0;
  std::vector<ObservationRecord> outcomes;
  std::vector<Belief> beliefs;  // exact online posteriors, beliefs[0] = prior
  std::size_t stop_stage = 0;
  std::size_t declared = 0;
  bool correct = false;
  CostCounters online_ops;

  /// Online primitive operations: |B| M per policy lookup, M per belief update,
  /// one per outcome draw.
  std::uint64_t total_ops() const noexcept {
    return online_ops.coordinate_comparisons + online_ops.belief_updates * beliefs.front().size() +
           online_ops.outcome_draws;
  }
};

/// Runs one episode: draws the hidden hypothesis from the prior, then follows
/// the policy read at Proj_B of the exact belief until a Stop action or t = H.
/// Outcomes are drawn from l_h(a, .) of the hidden hypothesis h.
EpisodeTrace run_episode(const PlannerConfig& cfg, const PlanTables& tables, CounterRng& rng);

struct MonteCarloSummary {
  std::size_t episodes = 0;
  std::uint64_t seed = 0;
  double success_rate = 0.0;
  double success_stderr = 0.0;
  double mean_stop_time = 0.0;
  double stop_time_stderr = 0.0;
  double mean_reward = 0.0;  // 1(correct) - c_meas * tau
  double reward_stderr = 0.0;
  /// Online cost model: ops = per_step_cost * tau + base_cost, with per-step
  /// cost = |B| M + M + 1 and base cost = |B| M (the final lookup).
  double per_step_cost = 0.0;
  double base_cost = 0.0;
  double mean_online_ops = 0.0;
  double predicted_online_ops = 0.0;  // per_step_cost * E[tau] + base_cost
  double fitted_slope = 0.0;          // regression of ops on realized tau
  double fitted_intercept = 0.0;
  std::vector<std::uint64_t> stop_time_histogram;  // index tau = 0..H
  CostCounters online_totals;
};

struct EpisodeOutcome {
  std::uint32_t hidden;
  std::uint32_t declared;
  std::uint32_t stop_stage;
  std::uint64_t ops;
};

/// n independent episodes; episode k uses CounterRng::substream(seed, k).
/// Episode results are reduced in index order, so the summary does not depend
/// on `threads`. `outcomes`, when given, receives one record per episode.
MonteCarloSummary monte_carlo(const PlannerConfig& cfg, const PlanTables& tables, std::size_t n,
                              std::uint64_t seed, unsigned threads = 1,
                              std::vector<EpisodeOutcome>* outcomes = nullptr);

/// Least-squares line y = slope * x + intercept.
std::pair<double, double> linear_fit(std::span<const double> x, std::span<const double> y);

}  // namespace sqsd
