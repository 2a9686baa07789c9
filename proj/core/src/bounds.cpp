#include "sqsd/bounds.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "sqsd/error.hpp"
#include "sqsd/rng.hpp"

namespace sqsd {

double obs_prob_lipschitz(const LikelihoodTable& table) {
  double best = 0.0;
  for (std::size_t a = 0; a < table.actions(); ++a) {
    for (std::size_t o = 0; o < table.outcomes(); ++o) {
      double s = 0.0;
      for (std::size_t i = 0; i < table.hypotheses(); ++i) s += table(i, a, o);
      best = std::max(best, s);
    }
  }
  return best;
}

double posterior_lipschitz_analytic(double obs_lipschitz, double eta) {
  if (!(eta > 0.0)) throw Error(ErrorCode::EtaNonPositive, "eta must be positive", eta);
  return obs_lipschitz / eta + obs_lipschitz / (eta * eta);
}

double posterior_lipschitz_sampled(const LikelihoodTable& table, std::size_t samples,
                                   std::uint64_t seed, double floor) {
  const std::size_t m = table.hypotheses();
  CounterRng rng(CounterRng::mix(seed ^ 0x7A5ULL));
  std::vector<double> post1(m), post2(m);
  double best = 0.0;
  for (std::size_t s = 0; s < samples; ++s) {
    const auto b1 = sample_simplex(m, rng);
    const auto u = sample_simplex(m, rng);
    // Mix toward a second random point with a log-uniform step in [1e-6, 1].
    const double lambda = std::pow(10.0, -6.0 * rng.uniform());
    std::vector<double> b2(m);
    for (std::size_t i = 0; i < m; ++i) b2[i] = (1.0 - lambda) * b1[i] + lambda * u[i];
    const double db = inf_distance(b1, b2);
    if (!(db > 0.0)) continue;
    const auto a = static_cast<std::size_t>(rng.uniform() * static_cast<double>(table.actions()));
    for (std::size_t o = 0; o < table.outcomes(); ++o) {
      double p1 = 0.0, p2 = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        post1[i] = b1[i] * table(i, a, o);
        post2[i] = b2[i] * table(i, a, o);
        p1 += post1[i];
        p2 += post2[i];
      }
      if (!(p1 > floor) || !(p2 > floor)) continue;
      for (std::size_t i = 0; i < m; ++i) {
        post1[i] /= p1;
        post2[i] /= p2;
      }
      best = std::max(best, inf_distance(post1, post2) / db);
    }
  }
  return best;
}

double circular_distance(double x, double y, double period) noexcept {
  double d = std::fmod(std::abs(x - y), period);
  return std::min(d, period - d);
}

LikelihoodLipschitz likelihood_lipschitz(const MeasurementLibrary& library,
                                         std::span<const DensityOperator> states) {
  if (!library.params()) {
    throw Error(ErrorCode::MissingParams, "action-Lipschitz constant needs parameter tags");
  }
  const auto& params = *library.params();
  const double period = library.period();
  const bool has_generator = family_povm(library.family(), params.front()).has_value();
  const std::size_t outcomes = library.outcome_count();
  constexpr int kRefine = 10;

  auto likelihoods = [&](const Povm& povm) {
    std::vector<double> l;
    for (const auto& rho : states) {
      for (const auto& e : povm.effects()) l.push_back(born_prob(e, rho));
    }
    return l;
  };

  LikelihoodLipschitz out;
  const std::size_t count = params.size();
  for (std::size_t a = 0; a < count; ++a) {
    const double lo = params[a];
    const double hi = (a + 1 < count) ? params[a + 1] : params.front() + period;
    if (has_generator) {
      auto prev = likelihoods(*family_povm(library.family(), lo));
      for (int k = 1; k <= kRefine; ++k) {
        const double x = lo + (hi - lo) * k / kRefine;
        const auto cur = likelihoods(*family_povm(library.family(), x));
        const double step = (hi - lo) / kRefine;
        // Past the period the generator may return the same effects with outcome labels
        // rotated (trine), so compare under the best cyclic relabelling.
        const std::size_t shifts = (x >= period) ? outcomes : 1;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t r = 0; r < shifts; ++r) {
          double worst = 0.0;
          for (std::size_t j = 0; j < cur.size(); ++j) {
            const std::size_t i = j / outcomes, o = j % outcomes;
            worst = std::max(worst, std::abs(cur[i * outcomes + (o + r) % outcomes] - prev[j]));
          }
          best = std::min(best, worst);
        }
        out.finite_difference = std::max(out.finite_difference, best / step);
        prev = cur;
      }
    } else if (count > 1) {
      const auto l0 = likelihoods(library.povm(a));
      const auto l1 = likelihoods(library.povm((a + 1) % count));
      const double step = hi - lo;
      for (std::size_t j = 0; j < l0.size(); ++j) {
        out.finite_difference = std::max(out.finite_difference, std::abs(l1[j] - l0[j]) / step);
      }
    }
  }
  // |d/dphi cos^2(x - phi)| = |sin(2(x - phi))| <= 1 and |d/dalpha (1 + cos(x - alpha))/3| <= 1/3.
  if (library.family() == MeasurementFamily::Binary) out.analytic = 1.0;
  if (library.family() == MeasurementFamily::Trine) out.analytic = 1.0 / 3.0;
  return out;
}

EtaEstimate estimate_eta(const LikelihoodTable& table, const BeliefGrid& grid, double floor) {
  EtaEstimate best;
  best.eta = std::numeric_limits<double>::infinity();
  for (std::size_t id = 0; id < grid.size(); ++id) {
    const auto b = grid.weights(id);
    for (std::size_t a = 0; a < table.actions(); ++a) {
      for (std::size_t o = 0; o < table.outcomes(); ++o) {
        double p = 0.0;
        for (std::size_t j = 0; j < b.size(); ++j) p += b[j] * table(j, a, o);
        if (p > floor && p < best.eta) best = {p, id, a, o};
      }
    }
  }
  if (!std::isfinite(best.eta)) {
    throw Error(ErrorCode::AllDegenerate, fmt::format("every outcome probability is <= {}", floor));
  }
  return best;
}

std::vector<double> belief_lipschitz_sequence(double obs_lipschitz, double posterior_lipschitz,
                                              std::size_t horizon, std::size_t outcomes,
                                              double value_sup) {
  std::vector<double> l(horizon + 1, 1.0);
  const double o = static_cast<double>(outcomes);
  for (std::size_t step = 0; step < horizon; ++step) {
    const std::size_t t = horizon - 1 - step;
    l[t] = std::max(1.0, o * (obs_lipschitz * value_sup + l[t + 1] * posterior_lipschitz));
  }
  return l;
}

std::vector<double> action_lipschitz_sequence(double likelihood_lipschitz, double eta,
                                              std::span<const double> belief_lipschitz,
                                              std::size_t outcomes, double value_sup) {
  if (!(eta > 0.0)) throw Error(ErrorCode::EtaNonPositive, "eta must be positive", eta);
  if (belief_lipschitz.empty()) return {};
  const std::size_t horizon = belief_lipschitz.size() - 1;
  const double o = static_cast<double>(outcomes);
  const double ratio = likelihood_lipschitz / eta + likelihood_lipschitz / (eta * eta);
  std::vector<double> k(horizon);
  for (std::size_t t = 0; t < horizon; ++t) {
    k[t] = o * (likelihood_lipschitz * value_sup + belief_lipschitz[t + 1] * ratio);
  }
  return k;
}

double delta_A(std::span<const double> params, double period) {
  if (params.empty()) throw Error(ErrorCode::MissingParams, "library has no parameters");
  double gap = params.front() + period - params.back();
  for (std::size_t a = 1; a < params.size(); ++a) gap = std::max(gap, params[a] - params[a - 1]);
  return 0.5 * gap;
}

RegularityConstants regularity_constants(const PlannerConfig& cfg,
                                         std::span<const DensityOperator> states,
                                         std::size_t samples, std::uint64_t seed) {
  RegularityConstants c;
  const auto& table = *cfg.table;
  c.obs_lipschitz = obs_prob_lipschitz(table);
  c.eta = estimate_eta(table, *cfg.grid);
  c.posterior_lipschitz = posterior_lipschitz_analytic(c.obs_lipschitz, c.eta.eta);
  c.posterior_lipschitz_sampled = posterior_lipschitz_sampled(table, samples, seed);
  c.likelihood = likelihood_lipschitz(*cfg.library, states);
  c.belief_lipschitz = belief_lipschitz_sequence(c.obs_lipschitz, c.posterior_lipschitz,
                                                 cfg.horizon, table.outcomes(), c.value_sup);
  c.action_lipschitz = action_lipschitz_sequence(c.likelihood.value(), c.eta.eta,
                                                 c.belief_lipschitz, table.outcomes(), c.value_sup);
  return c;
}

ErrorBudget total_budget(std::span<const double> belief_lipschitz,
                         std::span<const double> action_lipschitz, double delta_a,
                         double delta_b, std::size_t stage) {
  if (belief_lipschitz.empty() || action_lipschitz.size() + 1 != belief_lipschitz.size()) {
    throw Error(ErrorCode::DimMismatch, "need L_0..L_H and K_0..K_{H-1}");
  }
  const std::size_t horizon = action_lipschitz.size();
  if (stage > horizon) throw Error(ErrorCode::OutOfRange, "stage beyond horizon");

  auto at = [&](std::size_t t) {
    ErrorBudget b;
    b.stage = t;
    b.delta_A = delta_a;
    b.delta_B = delta_b;
    double k_sum = 0.0, k_max = 0.0;
    for (std::size_t s = t; s < horizon; ++s) {
      k_sum += action_lipschitz[s];
      k_max = std::max(k_max, action_lipschitz[s]);
    }
    double l_sum = 0.0, l_max = 0.0;
    for (std::size_t s = t + 1; s <= horizon; ++s) {
      l_sum += belief_lipschitz[s];
      l_max = std::max(l_max, belief_lipschitz[s]);
    }
    b.action_term = delta_a * k_sum;
    b.belief_term = delta_b * l_sum;
    b.total = b.belief_term + b.action_term;
    b.arbitrary_belief_term = delta_b * (l_sum + belief_lipschitz[t]);
    b.arbitrary_total = b.arbitrary_belief_term + b.action_term;
    const double remaining = static_cast<double>(horizon - t);
    b.uniform_belief_bound = remaining * l_max * delta_b;
    b.uniform_action_bound = remaining * k_max * delta_a;
    return b;
  };

  ErrorBudget out = at(stage);
  for (std::size_t t = 0; t <= horizon; ++t) {
    const auto b = at(t);
    out.per_stage.push_back({t, b.total, b.arbitrary_total});
  }
  return out;
}

bool ComplexityReport::all_match() const noexcept {
  return std::all_of(checks.begin(), checks.end(), [](const CountCheck& c) { return c.matches(); });
}

ComplexityReport complexity_report(const PlannerConfig& cfg, const CostCounters& counters) {
  if (counters.empty()) throw Error(ErrorCode::CountersEmpty, "planner has not run");
  ComplexityReport r;
  r.mode = cfg.mode;
  r.horizon = cfg.horizon;
  r.points = cfg.grid->size();
  r.actions = cfg.actions();
  r.outcomes = cfg.outcomes();
  r.hypotheses = cfg.hypotheses();
  r.zero_prob_skips = counters.zero_prob_skips;

  using u64 = std::uint64_t;
  const u64 h = r.horizon, nb = r.points, na = r.actions, no = r.outcomes, m = r.hypotheses;
  const u64 skips = counters.zero_prob_skips;
  // Raw mode evaluates every (t, b, a, o); memoized mode evaluates every (b, a, o) once.
  const u64 evaluated = (r.mode == ProjectionMode::Raw) ? h * nb * na * no : (h > 0 ? nb * na * no : 0);
  const u64 projected = evaluated - skips;
  const u64 accumulated = (r.mode == ProjectionMode::Raw) ? projected : h * projected;

  r.checks = {
      {"stop_evals", counters.stop_evals, (h + 1) * nb},
      {"obs_evals", counters.obs_evals, evaluated},
      {"posterior_evals", counters.posterior_evals, projected},
      {"projections", counters.projections, projected},
      {"projection_candidates", counters.projection_candidates, projected * nb},
      {"coordinate_comparisons", counters.coordinate_comparisons, projected * nb * m},
      {"lookups", counters.lookups, accumulated},
      {"aggregations", counters.aggregations, accumulated},
      {"actmax", counters.actmax, h * nb * na},
  };
  if (r.mode == ProjectionMode::Memoized) {
    r.checks.push_back({"memo_hits", counters.memo_hits, accumulated});
  }

  const double M = static_cast<double>(m), B = static_cast<double>(nb);
  const double A = static_cast<double>(na), O = static_cast<double>(no);
  const double bell_node = M + A * 1.0 + A * O * (M + M) + A * O * (B * M + 1.0 + 1.0) + A;
  r.symbolic_cost = B * M + static_cast<double>(h) * B * bell_node;
  r.leading_term = static_cast<double>(h) * A * O * M * B * B;
  return r;
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw Error(ErrorCode::DimMismatch, "slope fit needs two or more paired points");
  }
  double mx = 0.0, my = 0.0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

ScalingResult scaling_experiment(std::span<const int> resolutions,
                                 const std::function<PlannerConfig(int)>& make_config) {
  ScalingResult out;
  std::vector<double> sizes, candidates;
  for (int n : resolutions) {
    const auto cfg = make_config(n);
    ScalingPoint pt;
    pt.resolution = n;
    pt.points = cfg.grid->size();
    const auto start = std::chrono::steady_clock::now();
    (void)plan(cfg, pt.counters);
    pt.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    sizes.push_back(static_cast<double>(pt.points));
    candidates.push_back(static_cast<double>(pt.counters.projection_candidates));
    out.runs.push_back(pt);
  }
  if (out.runs.size() >= 2) out.candidate_slope = loglog_slope(sizes, candidates);
  return out;
}

}  // namespace sqsd
