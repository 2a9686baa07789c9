#include "sqsd/executor.hpp"

#include <cmath>

#include "sqsd/error.hpp"
#include "sqsd/parallel.hpp"

namespace sqsd {
namespace {

std::size_t draw_index(std::span<const double> probs, double u) {
  double cum = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t k = 0; k < probs.size(); ++k) {
    if (probs[k] <= 0.0) continue;
    last_positive = k;
    cum += probs[k];
    if (u < cum) return k;
  }
  return last_positive;  // u beyond a rounded-down cumulative sum
}

}  // namespace

EpisodeTrace run_episode(const PlannerConfig& cfg, const PlanTables& tables, CounterRng& rng) {
  const auto& grid = *cfg.grid;
  const auto& table = *cfg.table;
  if (tables.values.stages() != cfg.horizon + 1 || tables.values.points() != grid.size()) {
    throw Error(ErrorCode::DimMismatch, "plan tables do not match the planner config");
  }
  EpisodeTrace trace;
  trace.hidden = draw_index(cfg.prior.weights(), rng.uniform());
  trace.beliefs.push_back(cfg.prior);

  for (std::size_t t = 0;; ++t) {
    const Belief& b = trace.beliefs.back();
    const auto id = project(b.weights(), grid, &trace.online_ops).grid_id;
    ++trace.online_ops.policy_lookups;
    const Action act = tables.policy(t, id);
    if (act.is_stop() || t >= cfg.horizon) {
      trace.stop_stage = t;
      trace.declared = act.is_stop() ? act.index : argmax(grid.weights(id));
      break;
    }
    const std::size_t o = draw_index(table.row(trace.hidden, act.index), rng.uniform());
    ++trace.online_ops.outcome_draws;
    trace.outcomes.push_back({t, act.index, o});
    trace.beliefs.push_back(bayes_update(b, act.index, o, table));
    ++trace.online_ops.belief_updates;
  }
  trace.correct = trace.declared == trace.hidden;
  return trace;
}

std::pair<double, double> linear_fit(std::span<const double> x, std::span<const double> y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  const double slope = sxx > 0.0 ? sxy / sxx : 0.0;
  return {slope, my - slope * mx};
}

MonteCarloSummary monte_carlo(const PlannerConfig& cfg, const PlanTables& tables, std::size_t n,
                              std::uint64_t seed, unsigned threads,
                              std::vector<EpisodeOutcome>* outcomes) {
  if (n == 0) throw Error(ErrorCode::OutOfRange, "episode count must be >= 1");
  std::vector<EpisodeOutcome> results(n);
  const unsigned workers = resolve_threads(threads);
  std::vector<CostCounters> totals(workers);
  parallel_for(n, workers, [&](std::size_t begin, std::size_t end, unsigned w) {
    for (std::size_t k = begin; k < end; ++k) {
      auto rng = CounterRng::substream(seed, k);
      const auto trace = run_episode(cfg, tables, rng);
      results[k] = {static_cast<std::uint32_t>(trace.hidden),
                    static_cast<std::uint32_t>(trace.declared),
                    static_cast<std::uint32_t>(trace.stop_stage), trace.total_ops()};
      totals[w] += trace.online_ops;
    }
  });

  MonteCarloSummary s;
  s.episodes = n;
  s.seed = seed;
  s.stop_time_histogram.assign(cfg.horizon + 1, 0);
  for (const auto& c : totals) s.online_totals += c;

  const double m = static_cast<double>(cfg.hypotheses());
  const double bsize = static_cast<double>(cfg.grid->size());
  s.per_step_cost = bsize * m + m + 1.0;
  s.base_cost = bsize * m;

  double succ = 0.0, succ2 = 0.0, tau = 0.0, tau2 = 0.0, rew = 0.0, rew2 = 0.0, ops = 0.0;
  std::vector<double> xs(n), ys(n);
  for (std::size_t k = 0; k < n; ++k) {
    const auto& r = results[k];
    const double c = r.hidden == r.declared ? 1.0 : 0.0;
    const double t = static_cast<double>(r.stop_stage);
    const double reward = c - cfg.measurement_cost * t;
    succ += c;
    succ2 += c * c;
    tau += t;
    tau2 += t * t;
    rew += reward;
    rew2 += reward * reward;
    ops += static_cast<double>(r.ops);
    xs[k] = t;
    ys[k] = static_cast<double>(r.ops);
    ++s.stop_time_histogram[r.stop_stage];
  }
  const double dn = static_cast<double>(n);
  auto stderr_of = [dn](double sum, double sum2) {
    if (dn < 2.0) return 0.0;
    const double mean = sum / dn;
    const double var = std::max(0.0, (sum2 - dn * mean * mean) / (dn - 1.0));
    return std::sqrt(var / dn);
  };
  s.success_rate = succ / dn;
  s.success_stderr = stderr_of(succ, succ2);
  s.mean_stop_time = tau / dn;
  s.stop_time_stderr = stderr_of(tau, tau2);
  s.mean_reward = rew / dn;
  s.reward_stderr = stderr_of(rew, rew2);
  s.mean_online_ops = ops / dn;
  s.predicted_online_ops = s.per_step_cost * s.mean_stop_time + s.base_cost;
  std::tie(s.fitted_slope, s.fitted_intercept) = linear_fit(xs, ys);
  if (outcomes) *outcomes = std::move(results);
  return s;
}

}  // namespace sqsd
