#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sqsd/belief.hpp"
#include "sqsd/planner.hpp"
#include "sqsd/quantum.hpp"

namespace sqsd {

// ---------------------------------------------------------------------------
// Binary pure-state discrimination: |psi_1> = |0>, |psi_2> = cos t |0> + sin t |1>
// measured in the rotated basis {|e_0(phi)>, |e_1(phi)>}.
// ---------------------------------------------------------------------------

struct BinaryScenario {
  double theta = 1.0471975511965976;  // pi/3
  std::size_t library_size = 181;
  bool insert_optimal_angle = true;   // add theta/2 + pi/4 to the library
  int resolution = 2000;
  double measurement_cost = 0.01;
  std::size_t horizon = 2;
  double prior_first = 0.5;           // p = Pr(h = 1)
};

/// Helstrom-optimal projective angle theta/2 + pi/4 (mod pi).
double binary_optimal_angle(double theta);

/// Uniform phi library on [0, pi), optionally with the optimal angle inserted.
MeasurementLibrary binary_library(std::size_t count, double theta, bool insert_optimal);

PlannerConfig binary_config(const BinaryScenario& scn, ProjectionMode mode = ProjectionMode::Memoized,
                            unsigned threads = 1);

struct BinaryClosedForms {
  double prob0 = 0.0;      // Pr(o = 0 | p, phi)
  double prob1 = 0.0;
  double posterior0 = 0.0; // p'_0
  double posterior1 = 0.0; // p'_1
  double j1 = 0.0;
  double stop_val = 0.0;
};

/// Closed-form posteriors and one-step value. Throws ZeroProbabilityOutcome when
/// either outcome has probability <= kProbabilityFloor.
BinaryClosedForms binary_closed_forms(double theta, double p, double phi);

/// max{p cos^2 phi, (1-p) cos^2(theta-phi)} + max{p sin^2 phi, (1-p) sin^2(theta-phi)}.
double binary_j1(double theta, double p, double phi) noexcept;

/// 2001 points from 1e-3 to 1 - 1e-3, containing 1/2.
std::vector<double> default_binary_p_grid();

using Interval = std::pair<double, double>;

struct BinaryGainCurve {
  std::vector<double> p;
  std::vector<double> gain;
  std::vector<std::size_t> best_phi_index;
  /// Maximal runs of consecutive grid points with gain > c_meas, as [p_first, p_last].
  std::vector<Interval> measurement_region;
};

BinaryGainCurve binary_gain_curve(double theta, std::span<const double> p_grid,
                                  std::span<const double> phi_grid, double measurement_cost);

struct BinaryBellmanH2 {
  std::vector<double> p;
  std::vector<double> v2, v1, v0;
};

/// Two-stage Bellman recursion evaluated exactly at posteriors (no projection).
BinaryBellmanH2 binary_bellman_h2(double theta, double measurement_cost,
                                  std::span<const double> phi_grid, std::span<const double> p_grid);

// ---------------------------------------------------------------------------
// Trine ensemble on the Bloch equator.
// ---------------------------------------------------------------------------

struct TrineScenario {
  std::size_t alpha_count = 24;
  int resolution = 60;
  double measurement_cost = 0.02;
  std::size_t horizon = 2;
};

MeasurementLibrary trine_library(std::size_t count);

/// Likelihood table of the trine states under a trine library from the closed
/// form. It agrees with the Born-rule table to rounding, and unlike it is exactly
/// invariant under cyclic relabelling.
LikelihoodTable trine_likelihood_table(const MeasurementLibrary& library);

PlannerConfig trine_config(const TrineScenario& scn, ProjectionMode mode = ProjectionMode::Memoized,
                           unsigned threads = 1);

struct TrineMapRecord {
  std::size_t point = 0;
  std::array<double, 3> belief{};
  double x = 0.0, y = 0.0;
  double j1_star = 0.0;
  double gain = 0.0;
  double stop_val = 0.0;
  std::size_t alpha_index = 0;
  double alpha_star = 0.0;
};

/// One-step maps over the grid of a trine config, ordered by point id.
std::vector<TrineMapRecord> trine_maps(const PlannerConfig& cfg);

struct RoutingBranch {
  std::size_t outcome = 0;
  double probability = 0.0;
  std::optional<std::array<double, 3>> posterior;  // absent for zero-probability branches
  double x = 0.0, y = 0.0;
};

struct RoutingReport {
  std::array<double, 3> start{};
  double start_x = 0.0, start_y = 0.0;
  std::size_t action = 0;
  double orientation = 0.0;
  double j1_star = 0.0;
  double gain = 0.0;
  std::vector<RoutingBranch> branches;
  double normalization_residual = 0.0;  // |sum_o p_o - 1|
  double consistency_residual = 0.0;    // ||sum_o p_o posterior_o - start||_inf
  double max_posterior_sum_residual = 0.0;
};

RoutingReport trine_routing(const PlannerConfig& cfg, const Belief& start);

struct TrineHorizonMaps {
  PlanTables tables;
  std::vector<double> stop_val;
  std::vector<double> d1;  // V_1 - S
  std::vector<double> d0;  // V_0 - V_1
  /// Share of grid points whose policy measures, for stages 0..H-1.
  std::vector<double> continuation_fraction;
};

/// Requires horizon 2.
TrineHorizonMaps trine_finite_horizon(const PlannerConfig& cfg, CostCounters& counters);

struct NamedBelief {
  std::string label;
  Belief belief;
};

/// Cases A-D are fixed beliefs; E is the first interior grid point (lexicographic)
/// with positive gain whose alpha* differs from that of a lattice neighbour.
std::vector<NamedBelief> representative_cases(const PlannerConfig& cfg);

/// Grid id of the cyclically shifted point (c_M, c_1, ..., c_{M-1}).
std::size_t cyclic_shift(const BeliefGrid& grid, std::size_t id);

}  // namespace sqsd
