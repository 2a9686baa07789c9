#pragma once

#include <cstdint>

namespace sqsd {

/// Instrumented atomic-operation counts for offline planning and online
/// execution. Plain integers: each worker owns one instance and the totals
/// are merged with +=, so the result does not depend on scheduling.
struct CostCounters {
  // offline taxonomy
  std::uint64_t stop_evals = 0;          // StopVal(b) evaluations
  std::uint64_t obs_evals = 0;           // ObsProb(o|b,a) evaluations
  std::uint64_t posterior_evals = 0;     // Bayesian updates tau(b,a,o)
  std::uint64_t projections = 0;         // Proj_B calls
  std::uint64_t projection_candidates = 0;  // grid points scanned by Proj_B
  std::uint64_t coordinate_comparisons = 0; // |B| * M per projection
  std::uint64_t lookups = 0;             // V_{t+1} table reads
  std::uint64_t aggregations = 0;        // p_o * V accumulations
  std::uint64_t actmax = 0;              // best-action comparisons
  std::uint64_t zero_prob_skips = 0;     // outcomes skipped with p_o <= pfloor
  std::uint64_t memo_hits = 0;           // cached projection reuses

  // online taxonomy
  std::uint64_t policy_lookups = 0;
  std::uint64_t belief_updates = 0;
  std::uint64_t outcome_draws = 0;

  CostCounters& operator+=(const CostCounters& other) noexcept {
    stop_evals += other.stop_evals;
    obs_evals += other.obs_evals;
    posterior_evals += other.posterior_evals;
    projections += other.projections;
    projection_candidates += other.projection_candidates;
    coordinate_comparisons += other.coordinate_comparisons;
    lookups += other.lookups;
    aggregations += other.aggregations;
    actmax += other.actmax;
    zero_prob_skips += other.zero_prob_skips;
    memo_hits += other.memo_hits;
    policy_lookups += other.policy_lookups;
    belief_updates += other.belief_updates;
    outcome_draws += other.outcome_draws;
    return *this;
  }

  bool empty() const noexcept {
    return stop_evals == 0 && obs_evals == 0 && projections == 0 && policy_lookups == 0;
  }

  friend bool operator==(const CostCounters&, const CostCounters&) = default;
};

}  // namespace sqsd
