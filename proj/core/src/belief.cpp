#include "sqsd/belief.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "sqsd/error.hpp"
#include "sqsd/rng.hpp"

namespace sqsd {

Belief::Belief(std::vector<double> weights) : weights_(std::move(weights)) {
  if (weights_.empty()) throw Error(ErrorCode::InvalidBelief, "belief has no coordinates");
  double sum = 0.0;
  for (double w : weights_) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw Error(ErrorCode::InvalidBelief, fmt::format("negative or non-finite weight {}", w), w);
    }
    sum += w;
  }
  if (std::abs(sum - 1.0) > tol::kCompleteness) {
    throw Error(ErrorCode::InvalidBelief, fmt::format("weights sum to {}", sum), sum - 1.0);
  }
}

Belief Belief::uniform(std::size_t m) {
  return Belief(std::vector<double>(m, 1.0 / static_cast<double>(m)), Unchecked{});
}

Belief Belief::vertex(std::size_t m, std::size_t i) {
  std::vector<double> w(m, 0.0);
  w.at(i) = 1.0;
  return Belief(std::move(w), Unchecked{});
}

double stop_val(std::span<const double> b) noexcept {
  return *std::max_element(b.begin(), b.end());
}

std::size_t argmax(std::span<const double> b) noexcept {
  return static_cast<std::size_t>(std::max_element(b.begin(), b.end()) - b.begin());
}

double inf_distance(std::span<const double> x, std::span<const double> y) noexcept {
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) d = std::max(d, std::abs(x[i] - y[i]));
  return d;
}

double ordered_sum(std::span<double> terms) noexcept {
  std::sort(terms.begin(), terms.end());
  double s = 0.0;
  for (double x : terms) s += x;
  return s;
}

std::vector<double> obs_prob(std::span<const double> b, std::size_t action,
                             const LikelihoodTable& table) {
  if (b.size() != table.hypotheses()) {
    throw Error(ErrorCode::DimMismatch, "belief size does not match hypothesis count");
  }
  std::vector<double> p(table.outcomes(), 0.0);
  std::vector<double> terms(b.size());
  for (std::size_t o = 0; o < p.size(); ++o) {
    for (std::size_t j = 0; j < b.size(); ++j) terms[j] = b[j] * table(j, action, o);
    p[o] = ordered_sum(terms);
  }
  return p;
}

Belief bayes_update(const Belief& b, std::size_t action, std::size_t outcome,
                    const LikelihoodTable& table) {
  if (b.size() != table.hypotheses()) {
    throw Error(ErrorCode::DimMismatch, "belief size does not match hypothesis count");
  }
  std::vector<double> post(b.size());
  for (std::size_t j = 0; j < b.size(); ++j) post[j] = b[j] * table(j, action, outcome);
  std::vector<double> terms = post;
  const double denom = ordered_sum(terms);
  if (!(denom > kProbabilityFloor)) {
    throw Error(ErrorCode::ZeroProbabilityOutcome,
                fmt::format("Pr(o={} | b, a={}) = {}", outcome, action, denom), denom);
  }
  for (auto& x : post) x /= denom;
  return Belief(std::move(post), Belief::Unchecked{});
}

std::optional<std::size_t> BeliefGrid::lattice_size(int resolution, int dim, std::size_t cap) {
  // C(N + M - 1, M - 1) computed incrementally; every partial product is itself a binomial.
  const std::size_t k = static_cast<std::size_t>(dim - 1);
  const std::size_t n = static_cast<std::size_t>(resolution) + k;
  std::size_t result = 1;
  for (std::size_t i = 1; i <= k; ++i) {
    const std::size_t num = n - k + i;
    if (result > std::numeric_limits<std::size_t>::max() / num) return std::nullopt;
    result = result * num / i;
    if (result > cap && i == k) return std::nullopt;
  }
  if (result > cap) return std::nullopt;
  return result;
}

BeliefGrid::BeliefGrid(int resolution, int dim, std::size_t cap)
    : resolution_(resolution), dim_(dim), size_(0) {
  if (resolution < 1) throw Error(ErrorCode::OutOfRange, "grid resolution must be >= 1");
  if (dim < 2) throw Error(ErrorCode::OutOfRange, "belief dimension must be >= 2");
  const auto count = lattice_size(resolution, dim, cap);
  if (!count) {
    throw Error(ErrorCode::SizeOverflow,
                fmt::format("grid N={} M={} exceeds the cap of {} points", resolution, dim, cap));
  }
  size_ = *count;
  const auto m = static_cast<std::size_t>(dim);
  coords_.reserve(size_ * m);

  // Enumerate compositions of N into M parts in lexicographic order.
  std::vector<int> c(m, 0);
  c[m - 1] = resolution;
  while (true) {
    coords_.insert(coords_.end(), c.begin(), c.end());
    // Next composition: find rightmost position k < m-1 that can be incremented,
    // i.e. with positive mass remaining to its right.
    int k = static_cast<int>(m) - 2;
    while (k >= 0) {
      int rest = 0;
      for (std::size_t j = static_cast<std::size_t>(k) + 1; j < m; ++j) rest += c[j];
      if (rest > 0) break;
      --k;
    }
    if (k < 0) break;
    int rest = 0;
    for (std::size_t j = static_cast<std::size_t>(k) + 1; j < m; ++j) rest += c[j];
    ++c[static_cast<std::size_t>(k)];
    for (std::size_t j = static_cast<std::size_t>(k) + 1; j < m; ++j) c[j] = 0;
    c[m - 1] = rest - 1;
  }

  weights_.resize(coords_.size());
  scaled_.resize(coords_.size());
  const double n = static_cast<double>(resolution);
  for (std::size_t q = 0; q < coords_.size(); ++q) {
    scaled_[q] = static_cast<double>(coords_[q]);
    weights_[q] = scaled_[q] / n;
  }
}

Belief BeliefGrid::belief(std::size_t id) const {
  auto w = weights(id);
  return Belief(std::vector<double>(w.begin(), w.end()));
}

std::optional<std::size_t> BeliefGrid::index_of(std::span<const int> coords) const {
  if (coords.size() != static_cast<std::size_t>(dim_)) return std::nullopt;
  int total = 0;
  for (int c : coords) {
    if (c < 0) return std::nullopt;
    total += c;
  }
  if (total != resolution_) return std::nullopt;
  // Rank in lexicographic order: count compositions that precede `coords`.
  std::size_t rank = 0;
  int remaining = resolution_;
  for (std::size_t k = 0; k + 1 < coords.size(); ++k) {
    const int parts_after = dim_ - static_cast<int>(k) - 1;
    for (int v = 0; v < coords[k]; ++v) {
      rank += *lattice_size(remaining - v, parts_after, std::numeric_limits<std::size_t>::max());
    }
    remaining -= coords[k];
  }
  return rank;
}

BeliefGrid build_grid(int resolution, int dim, std::size_t cap) {
  return BeliefGrid(resolution, dim, cap);
}

std::size_t canonical_rotation(std::span<const double> x) noexcept {
  const std::size_t m = x.size();
  std::size_t best = 0;
  for (std::size_t r = 1; r < m; ++r) {
    for (std::size_t i = 0; i < m; ++i) {
      const double a = x[(i + r) % m], b = x[(i + best) % m];
      if (std::abs(a - b) <= kProjectionTieTolerance) continue;
      if (a < b) best = r;
      break;
    }
  }
  return best;
}

ProjectionResult project(std::span<const double> b, const BeliefGrid& grid,
                         CostCounters* counters) {
  const std::size_t m = static_cast<std::size_t>(grid.dim());
  const std::size_t count = grid.size();
  const double n = static_cast<double>(grid.resolution());
  // Distances are compared in lattice units, |N b_i - c_i|, where the grid side is exact.
  double scaled[16], target[16];
  std::vector<double> heap(m > 16 ? 2 * m : 0);
  double* x = m > 16 ? heap.data() : scaled;
  double* t = m > 16 ? heap.data() + m : target;
  for (std::size_t i = 0; i < m; ++i) x[i] = n * b[i];
  // Scan in the rotated frame where the target is lexicographically smallest, so
  // the tie rule commutes with cyclic relabelling of the hypotheses.
  const std::size_t rot = canonical_rotation({x, m});
  for (std::size_t i = 0; i < m; ++i) t[i] = x[(i + rot) % m];

  const double* c = grid.scaled_coords().data();
  std::size_t best_id = 0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t id = 0; id < count; ++id, c += m) {
    double d = 0.0;
    std::size_t i = 0;
    for (; i < m; ++i) {
      d = std::max(d, std::abs(t[i] - c[i]));
      if (d >= best - kProjectionTieTolerance) break;  // a tie keeps the earlier point
    }
    if (i == m) {
      best = d;
      best_id = id;
    }
  }
  if (counters) {
    counters->projections += 1;
    counters->projection_candidates += count;
    counters->coordinate_comparisons += count * m;
  }
  if (rot != 0) {
    const auto rc = grid.coords(best_id);
    std::vector<int> back(m);
    for (std::size_t i = 0; i < m; ++i) back[(i + rot) % m] = rc[i];
    best_id = *grid.index_of(back);
  }
  return {best_id, best / n};
}

std::pair<double, double> simplex_embedding(std::span<const double> b) noexcept {
  return {b[1] + 0.5 * b[2], 0.5 * std::sqrt(3.0) * b[2]};
}

DeltaBEstimate estimate_delta_B(const BeliefGrid& grid, std::size_t samples, std::uint64_t seed) {
  DeltaBEstimate est;
  est.samples = samples;
  est.seed = seed;
  CounterRng rng(CounterRng::mix(seed));
  const auto m = static_cast<std::size_t>(grid.dim());
  for (std::size_t s = 0; s < samples; ++s) {
    const auto x = sample_simplex(m, rng);
    est.sampled = std::max(est.sampled, project(x, grid).distance);
  }
  if (m == 2) est.exact = 0.5 / static_cast<double>(grid.resolution());
  return est;
}

}  // namespace sqsd
