#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sqsd/belief.hpp"
#include "sqsd/counters.hpp"
#include "sqsd/planner.hpp"
#include "sqsd/quantum.hpp"

namespace sqsd {

/// Floor below which outcome probabilities are left out of the nondegeneracy
/// constant and of sampled posterior ratios.
inline constexpr double kEtaFloor = 1e-6;

/// Belief-Lipschitz constant of ObsProb in the infinity norm: max_{a,o} sum_i l_i(a,o).
double obs_prob_lipschitz(const LikelihoodTable& table);

/// Quotient-rule bound for the posterior map: C_P / eta + C_P / eta^2.
double posterior_lipschitz_analytic(double obs_lipschitz, double eta);

/// Largest observed ||tau(b) - tau(b')||_inf / ||b - b'||_inf over sampled
/// pairs, restricted to outcomes with probability above `floor` at both beliefs.
double posterior_lipschitz_sampled(const LikelihoodTable& table, std::size_t samples,
                                   std::uint64_t seed, double floor = kEtaFloor);

struct LikelihoodLipschitz {
  double finite_difference = 0.0;  // sup of chord slopes over a refined parameter probe
  std::optional<double> analytic;  // derivative bound for the named families

  double value() const noexcept { return analytic.value_or(finite_difference); }
};

/// Action-Lipschitz constant of the likelihoods in circular parameter distance.
/// Throws MissingParams for untagged libraries.
LikelihoodLipschitz likelihood_lipschitz(const MeasurementLibrary& library,
                                         std::span<const DensityOperator> states);

struct EtaEstimate {
  double eta = 0.0;
  std::size_t point = 0;
  std::size_t action = 0;
  std::size_t outcome = 0;
};

/// min ObsProb(o|b,a) over grid beliefs, actions and outcomes above `floor`.
EtaEstimate estimate_eta(const LikelihoodTable& table, const BeliefGrid& grid,
                         double floor = kEtaFloor);

/// L_H = 1, L_t = max{1, |O| (C_P V_sup + L_{t+1} C_tau)}; returns L_0..L_H.
std::vector<double> belief_lipschitz_sequence(double obs_lipschitz, double posterior_lipschitz,
                                              std::size_t horizon, std::size_t outcomes,
                                              double value_sup = 1.0);

/// K_t = |O| [L_l V_sup + L_{t+1} (L_l / eta + L_l / eta^2)]; returns K_0..K_{H-1}.
std::vector<double> action_lipschitz_sequence(double likelihood_lipschitz, double eta,
                                              std::span<const double> belief_lipschitz,
                                              std::size_t outcomes, double value_sup = 1.0);

/// Circular distance on a parameter circle of the given period.
double circular_distance(double x, double y, double period) noexcept;

/// Library covering radius: half the largest circular gap between sorted parameters.
double delta_A(std::span<const double> params, double period);

struct RegularityConstants {
  double obs_lipschitz = 0.0;               // C_P^b
  double posterior_lipschitz = 0.0;         // C_tau^b, analytic bound used in budgets
  double posterior_lipschitz_sampled = 0.0; // C_tau^b, sampled supremum
  LikelihoodLipschitz likelihood;           // L_l
  EtaEstimate eta;
  double value_sup = 1.0;
  std::vector<double> belief_lipschitz;     // L_0..L_H
  std::vector<double> action_lipschitz;     // K_0..K_{H-1}
};

RegularityConstants regularity_constants(const PlannerConfig& cfg,
                                         std::span<const DensityOperator> states,
                                         std::size_t samples, std::uint64_t seed);

struct StageBudget {
  std::size_t stage = 0;
  double grid_total = 0.0;       // bound on the grid
  double arbitrary_total = 0.0;  // bound for the projected estimator at any belief
};

struct ErrorBudget {
  std::size_t stage = 0;
  double delta_B = 0.0;
  double delta_A = 0.0;
  double belief_term = 0.0;            // delta_B sum_{s=t+1}^{H} L_s
  double action_term = 0.0;            // delta_A sum_{s=t}^{H-1} K_s
  double total = 0.0;                  // belief_term + action_term
  double arbitrary_belief_term = 0.0;  // delta_B sum_{s=t}^{H} L_s
  double arbitrary_total = 0.0;
  double uniform_belief_bound = 0.0;   // (H - t) max L delta_B
  double uniform_action_bound = 0.0;   // (H - t) max K delta_A
  std::vector<StageBudget> per_stage;  // every stage 0..H
};

ErrorBudget total_budget(std::span<const double> belief_lipschitz,
                         std::span<const double> action_lipschitz, double delta_a,
                         double delta_b, std::size_t stage);

/// One atomic operation type: measured count next to the count predicted by the
/// loop structure of the planner.
struct CountCheck {
  std::string name;
  std::uint64_t measured = 0;
  std::uint64_t predicted = 0;
  bool matches() const noexcept { return measured == predicted; }
};

struct ComplexityReport {
  ProjectionMode mode = ProjectionMode::Raw;
  std::size_t horizon = 0;
  std::size_t points = 0;
  std::size_t actions = 0;
  std::size_t outcomes = 0;
  std::size_t hypotheses = 0;
  std::uint64_t zero_prob_skips = 0;
  std::vector<CountCheck> checks;
  /// Unit-cost evaluation of the whole-planner formula (C_proj = |B| M, other
  /// per-node primitives M or 1) and the H |A| |O| M |B|^2 leading term.
  double symbolic_cost = 0.0;
  double leading_term = 0.0;

  bool all_match() const noexcept;
};

ComplexityReport complexity_report(const PlannerConfig& cfg, const CostCounters& counters);

/// Least-squares slope of log(y) against log(x).
double loglog_slope(std::span<const double> x, std::span<const double> y);

struct ScalingPoint {
  int resolution = 0;
  std::size_t points = 0;
  CostCounters counters;
  double seconds = 0.0;
};

struct ScalingResult {
  std::vector<ScalingPoint> runs;
  double candidate_slope = 0.0;  // projection candidates vs |B|
};

/// Plans once per resolution with the config produced by `make_config` and fits
/// the log-log slope of projection candidate scans against |B|.
ScalingResult scaling_experiment(std::span<const int> resolutions,
                                 const std::function<PlannerConfig(int)>& make_config);

}  // namespace sqsd
