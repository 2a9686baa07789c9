#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "sqsd/counters.hpp"
#include "sqsd/quantum.hpp"

namespace sqsd {

/// Outcomes with probability at or below this are skipped by the planner and
/// rejected by bayes_update().
inline constexpr double kProbabilityFloor = 1e-12;

/// Point on the probability simplex over M hypotheses.
class Belief {
 public:
  /// Validates nonnegativity and unit sum (within tol::kCompleteness).
  explicit Belief(std::vector<double> weights);

  static Belief uniform(std::size_t m);
  static Belief vertex(std::size_t m, std::size_t i);

  std::size_t size() const noexcept { return weights_.size(); }
  double operator[](std::size_t i) const noexcept { return weights_[i]; }
  std::span<const double> weights() const noexcept { return weights_; }

  friend bool operator==(const Belief&, const Belief&) = default;

 private:
  struct Unchecked {};
  Belief(std::vector<double> weights, Unchecked) : weights_(std::move(weights)) {}
  std::vector<double> weights_;

  friend Belief bayes_update(const Belief&, std::size_t, std::size_t, const LikelihoodTable&);
};

/// max_i b(i).
double stop_val(std::span<const double> b) noexcept;
inline double stop_val(const Belief& b) noexcept { return stop_val(b.weights()); }

/// Smallest index attaining max_i b(i).
std::size_t argmax(std::span<const double> b) noexcept;

/// Sum of the terms taken in ascending order (the span is sorted in place). The
/// result depends only on the multiset of terms, so relabelling hypotheses or
/// outcomes cannot change how it rounds.
double ordered_sum(std::span<double> terms) noexcept;

double inf_distance(std::span<const double> x, std::span<const double> y) noexcept;

/// Pr(o | b, a) = sum_j b(j) l_j(a, o), for every outcome.
std::vector<double> obs_prob(std::span<const double> b, std::size_t action,
                             const LikelihoodTable& table);

/// Posterior tau(b, a, o). Throws ZeroProbabilityOutcome when Pr(o|b,a) <= kProbabilityFloor.
Belief bayes_update(const Belief& b, std::size_t action, std::size_t outcome,
                    const LikelihoodTable& table);

/// Regular barycentric lattice {c / N : c in Z_{>=0}^M, sum c = N}, with points
/// in lexicographic order of their integer coordinates.
class BeliefGrid {
 public:
  static constexpr std::size_t kDefaultCap = 20'000'000;

  BeliefGrid(int resolution, int dim, std::size_t cap = kDefaultCap);

  int resolution() const noexcept { return resolution_; }
  int dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return size_; }

  std::span<const double> weights(std::size_t id) const noexcept {
    return {weights_.data() + id * static_cast<std::size_t>(dim_), static_cast<std::size_t>(dim_)};
  }
  std::span<const int> coords(std::size_t id) const noexcept {
    return {coords_.data() + id * static_cast<std::size_t>(dim_), static_cast<std::size_t>(dim_)};
  }
  Belief belief(std::size_t id) const;

  /// Point id of integer coordinates summing to N, if valid.
  std::optional<std::size_t> index_of(std::span<const int> coords) const;

  /// Coordinates as doubles, laid out like weights(); used by the projection scan.
  const std::vector<double>& scaled_coords() const noexcept { return scaled_; }

  /// C(N + M - 1, M - 1), or nullopt when it exceeds `cap`.
  static std::optional<std::size_t> lattice_size(int resolution, int dim, std::size_t cap);

 private:
  int resolution_;
  int dim_;
  std::size_t size_;
  std::vector<int> coords_;
  std::vector<double> weights_;
  std::vector<double> scaled_;
};

BeliefGrid build_grid(int resolution, int dim, std::size_t cap = BeliefGrid::kDefaultCap);

struct ProjectionResult {
  std::size_t grid_id;
  double distance;  // infinity norm
};

/// Distances (in lattice units, |N b_i - c_i|) closer than this count as ties.
/// Posteriors that are exactly equidistant in real arithmetic otherwise get
/// split by rounding noise instead of by the tie rule.
inline constexpr double kProjectionTieTolerance = 1e-9;

/// Rotation r minimizing (x_r, x_{r+1}, ..., x_{r-1}) lexicographically, with
/// entries within kProjectionTieTolerance compared as equal; smallest r on ties.
std::size_t canonical_rotation(std::span<const double> x) noexcept;

/// Nearest grid point in the infinity norm by linear scan. Ties go to the
/// lexicographically smallest integer coordinate, read in the canonical cyclic
/// frame of N b (see canonical_rotation), which keeps the rule equivariant under
/// cyclic relabelling of hypotheses. Adds |B| candidates and |B| * M coordinate
/// comparisons to `counters` when given.
ProjectionResult project(std::span<const double> b, const BeliefGrid& grid,
                         CostCounters* counters = nullptr);

/// Planar embedding for M = 3: x = b2 + b3/2, y = (sqrt(3)/2) b3.
std::pair<double, double> simplex_embedding(std::span<const double> b) noexcept;

struct DeltaBEstimate {
  double sampled = 0.0;           // max projection distance over the samples
  std::optional<double> exact;    // 1/(2N), available for M = 2
  std::size_t samples = 0;
  std::uint64_t seed = 0;

  double value() const noexcept { return exact.value_or(sampled); }
};

/// Projection radius sup_x ||x - Proj_B(x)||_inf, estimated from uniform
/// Dirichlet samples. The sampled value is a lower bound on the true radius.
DeltaBEstimate estimate_delta_B(const BeliefGrid& grid, std::size_t samples, std::uint64_t seed);

/// Uniform sample on the simplex.
template <typename Rng>
std::vector<double> sample_simplex(std::size_t m, Rng& rng) {
  std::vector<double> w(m);
  double total = 0.0;
  for (auto& x : w) {
    x = rng.exponential();
    total += x;
  }
  for (auto& x : w) x /= total;
  return w;
}

}  // namespace sqsd
