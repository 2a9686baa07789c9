#include "sqsd/planner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "sqsd/error.hpp"
#include "sqsd/parallel.hpp"

namespace sqsd {

PlannerConfig::PlannerConfig(std::size_t horizon_, double measurement_cost_,
                             std::shared_ptr<const BeliefGrid> grid_,
                             std::shared_ptr<const MeasurementLibrary> library_,
                             std::shared_ptr<const LikelihoodTable> table_, Belief prior_)
    : horizon(horizon_),
      measurement_cost(measurement_cost_),
      grid(std::move(grid_)),
      library(std::move(library_)),
      table(std::move(table_)),
      prior(std::move(prior_)) {
  if (!grid || !library || !table) throw Error(ErrorCode::InvalidConfig, "planner input missing");
  if (!(measurement_cost >= 0.0) || !std::isfinite(measurement_cost)) {
    throw Error(ErrorCode::InvalidConfig, "measurement cost must be finite and >= 0");
  }
  if (static_cast<std::size_t>(grid->dim()) != table->hypotheses() ||
      prior.size() != table->hypotheses()) {
    throw Error(ErrorCode::DimMismatch, "grid, prior and likelihood table disagree on M");
  }
  if (library->size() != table->actions() || library->outcome_count() != table->outcomes()) {
    throw Error(ErrorCode::DimMismatch, "library and likelihood table disagree on |A| or |O|");
  }
}

double one_step_value(std::span<const double> b, std::size_t action,
                      const LikelihoodTable& table) {
  std::vector<double> terms(table.outcomes(), 0.0);
  for (std::size_t o = 0; o < table.outcomes(); ++o) {
    for (std::size_t i = 0; i < b.size(); ++i) terms[o] = std::max(terms[o], b[i] * table(i, action, o));
  }
  return ordered_sum(terms);
}

double one_step_value_routed(std::span<const double> b, std::size_t action,
                             const LikelihoodTable& table) {
  const auto p = obs_prob(b, action, table);
  std::vector<double> terms(p.size(), 0.0);
  for (std::size_t o = 0; o < p.size(); ++o) {
    if (!(p[o] > 0.0)) continue;
    double best = 0.0;
    for (std::size_t i = 0; i < b.size(); ++i) {
      best = std::max(best, b[i] * table(i, action, o) / p[o]);
    }
    terms[o] = p[o] * best;
  }
  return ordered_sum(terms);
}

OneStepOptimum one_step_opt(std::span<const double> b, const LikelihoodTable& table,
                            const MeasurementLibrary& library) {
  if (table.actions() == 0) throw Error(ErrorCode::EmptyLibrary, "no measurement actions");
  OneStepOptimum best;
  best.value = -std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < table.actions(); ++a) {
    const double v = one_step_value(b, a, table);
    if (v > best.value) {
      best.value = v;
      best.action = a;
    }
  }
  if (library.params()) best.orientation = (*library.params())[best.action];
  return best;
}

double gain(std::span<const double> b, const LikelihoodTable& table,
            const MeasurementLibrary& library) {
  return one_step_opt(b, table, library).value - stop_val(b);
}

namespace {

constexpr std::uint32_t kSkipped = std::numeric_limits<std::uint32_t>::max();

/// Per-(b, a, o) outcome probability and projected posterior target.
struct Transition {
  double probability;
  std::uint32_t target;  // kSkipped when probability <= kProbabilityFloor
};

/// Outcome probability and posterior target for grid point `id`, action `a`, outcome `o`.
Transition transition(const PlannerConfig& cfg, std::span<const double> b, std::size_t a,
                      std::size_t o, std::vector<double>& scratch, CostCounters& counters) {
  const auto& table = *cfg.table;
  const std::size_t m = b.size();
  for (std::size_t j = 0; j < m; ++j) scratch[j] = b[j] * table(j, a, o);
  const double p = ordered_sum(scratch);
  ++counters.obs_evals;
  if (!(p > kProbabilityFloor)) {
    ++counters.zero_prob_skips;
    return {p, kSkipped};
  }
  for (std::size_t j = 0; j < m; ++j) scratch[j] = b[j] * table(j, a, o) / p;
  ++counters.posterior_evals;
  const auto proj = project(scratch, *cfg.grid, &counters);
  return {p, static_cast<std::uint32_t>(proj.grid_id)};
}

}  // namespace

PlanTables plan(const PlannerConfig& cfg, CostCounters& counters) {
  const auto& grid = *cfg.grid;
  const std::size_t points = grid.size();
  const std::size_t actions = cfg.actions();
  const std::size_t outcomes = cfg.outcomes();
  const std::size_t horizon = cfg.horizon;
  if (points >= kSkipped) throw Error(ErrorCode::SizeOverflow, "grid too large for planner ids");

  PlanTables out{ValueTable(horizon + 1, points), PolicyTable(horizon + 1, points)};
  const unsigned threads = resolve_threads(cfg.threads);
  std::vector<CostCounters> worker_counters(threads);

  for (std::size_t id = 0; id < points; ++id) {
    const auto b = grid.weights(id);
    out.values(horizon, id) = stop_val(b);
    out.policy(horizon, id) = Action::stop(argmax(b));
  }
  counters.stop_evals += points;

  std::vector<Transition> memo;
  if (cfg.mode == ProjectionMode::Memoized && horizon > 0) {
    memo.resize(points * actions * outcomes);
    parallel_for(points, threads, [&](std::size_t begin, std::size_t end, unsigned w) {
      std::vector<double> scratch(static_cast<std::size_t>(grid.dim()));
      auto& c = worker_counters[w];
      for (std::size_t id = begin; id < end; ++id) {
        const auto b = grid.weights(id);
        for (std::size_t a = 0; a < actions; ++a) {
          for (std::size_t o = 0; o < outcomes; ++o) {
            memo[(id * actions + a) * outcomes + o] = transition(cfg, b, a, o, scratch, c);
          }
        }
      }
    });
  }

  for (std::size_t step = 0; step < horizon; ++step) {
    const std::size_t t = horizon - 1 - step;
    const auto next = out.values.row(t + 1);
    parallel_for(points, threads, [&](std::size_t begin, std::size_t end, unsigned w) {
      std::vector<double> scratch(static_cast<std::size_t>(grid.dim()));
      std::vector<double> terms(outcomes);
      auto& c = worker_counters[w];
      for (std::size_t id = begin; id < end; ++id) {
        const auto b = grid.weights(id);
        const double v_stop = stop_val(b);
        ++c.stop_evals;
        double v_meas = -std::numeric_limits<double>::infinity();
        std::size_t a_meas = 0;
        for (std::size_t a = 0; a < actions; ++a) {
          std::fill(terms.begin(), terms.end(), 0.0);
          for (std::size_t o = 0; o < outcomes; ++o) {
            Transition tr;
            if (memo.empty()) {
              tr = transition(cfg, b, a, o, scratch, c);
            } else {
              tr = memo[(id * actions + a) * outcomes + o];
              if (tr.target != kSkipped) ++c.memo_hits;
            }
            if (tr.target == kSkipped) continue;
            ++c.lookups;
            ++c.aggregations;
            terms[o] = tr.probability * next[tr.target];
          }
          const double q = ordered_sum(terms) - cfg.measurement_cost;
          ++c.actmax;
          if (q > v_meas) {
            v_meas = q;
            a_meas = a;
          }
        }
        if (v_stop >= v_meas) {
          out.values(t, id) = v_stop;
          out.policy(t, id) = Action::stop(argmax(b));
        } else {
          out.values(t, id) = v_meas;
          out.policy(t, id) = Action::measure(a_meas);
        }
      }
    });
  }
  for (const auto& c : worker_counters) counters += c;
  return out;
}

double value_at(std::span<const double> b, std::size_t t, const ValueTable& values,
                const BeliefGrid& grid) {
  if (t >= values.stages()) throw Error(ErrorCode::OutOfRange, "stage beyond horizon");
  return values(t, project(b, grid).grid_id);
}

ValueTable exact_1d_oracle(const LikelihoodTable& table, std::size_t horizon,
                           double measurement_cost, int resolution, std::size_t cap) {
  if (table.hypotheses() != 2) throw Error(ErrorCode::DimMismatch, "1-D oracle needs M = 2");
  if (resolution < 1) throw Error(ErrorCode::OutOfRange, "oracle resolution must be >= 1");
  const auto n_points = static_cast<std::size_t>(resolution) + 1;
  if (n_points > cap) {
    throw Error(ErrorCode::SizeOverflow, fmt::format("oracle resolution {} over cap", resolution));
  }
  const double n = static_cast<double>(resolution);
  // Point id i has first coordinate i/N (lexicographic order of (i, N - i)).
  auto nearest = [&](double p1) {
    const double x = p1 * n;
    double lo = std::floor(x);
    lo = std::clamp(lo, 0.0, n);
    const double hi = std::min(lo + 1.0, n);
    const double gap = (x - lo) - (hi - x);
    if (std::abs(gap) > kProjectionTieTolerance) return static_cast<std::size_t>(gap < 0.0 ? lo : hi);
    // Same tie rule as project(): lexicographic in the frame where (x, N - x) is smallest.
    const bool swapped = x > (n - x) + kProjectionTieTolerance;
    return static_cast<std::size_t>(swapped ? hi : lo);
  };

  ValueTable values(horizon + 1, n_points);
  for (std::size_t i = 0; i < n_points; ++i) {
    const double p = static_cast<double>(i) / n;
    values(horizon, i) = std::max(p, static_cast<double>(n_points - 1 - i) / n);
  }
  const std::size_t actions = table.actions();
  const std::size_t outcomes = table.outcomes();
  for (std::size_t step = 0; step < horizon; ++step) {
    const std::size_t t = horizon - 1 - step;
    for (std::size_t i = 0; i < n_points; ++i) {
      const double p = static_cast<double>(i) / n;
      const double q1 = static_cast<double>(n_points - 1 - i) / n;
      double best = -std::numeric_limits<double>::infinity();
      for (std::size_t a = 0; a < actions; ++a) {
        double q = -measurement_cost;
        for (std::size_t o = 0; o < outcomes; ++o) {
          const double w1 = p * table(0, a, o);
          const double w2 = q1 * table(1, a, o);
          const double po = w1 + w2;
          if (!(po > kProbabilityFloor)) continue;
          q += po * values(t + 1, nearest(w1 / po));
        }
        best = std::max(best, q);
      }
      values(t, i) = std::max(std::max(p, q1), best);
    }
  }
  return values;
}

}  // namespace sqsd
