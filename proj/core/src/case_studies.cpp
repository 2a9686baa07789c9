#include "sqsd/case_studies.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <fmt/format.h>

#include "sqsd/error.hpp"
#include "sqsd/parallel.hpp"

namespace sqsd {

double binary_optimal_angle(double theta) {
  const double period = std::numbers::pi;
  double phi = std::fmod(0.5 * theta + 0.25 * std::numbers::pi, period);
  if (phi < 0.0) phi += period;
  return phi;
}

MeasurementLibrary binary_library(std::size_t count, double theta, bool insert_optimal) {
  auto params = uniform_parameters(count, family_period(MeasurementFamily::Binary));
  std::optional<double> extra;
  if (insert_optimal) extra = binary_optimal_angle(theta);
  return family_library(MeasurementFamily::Binary, std::move(params), extra);
}

PlannerConfig binary_config(const BinaryScenario& scn, ProjectionMode mode, unsigned threads) {
  if (!(scn.theta > 0.0 && scn.theta < 0.5 * std::numbers::pi)) {
    throw Error(ErrorCode::OutOfRange, fmt::format("theta {} not in (0, pi/2)", scn.theta));
  }
  auto library = std::make_shared<const MeasurementLibrary>(
      binary_library(scn.library_size, scn.theta, scn.insert_optimal_angle));
  const auto states = binary_states(scn.theta);
  auto table = std::make_shared<const LikelihoodTable>(build_likelihood_table(states, *library));
  auto grid = std::make_shared<const BeliefGrid>(scn.resolution, 2);
  PlannerConfig cfg(scn.horizon, scn.measurement_cost, std::move(grid), std::move(library),
                    std::move(table), Belief({scn.prior_first, 1.0 - scn.prior_first}));
  cfg.mode = mode;
  cfg.threads = threads;
  return cfg;
}

double binary_j1(double theta, double p, double phi) noexcept {
  const double c1 = std::cos(phi), s1 = std::sin(phi);
  const double c2 = std::cos(theta - phi), s2 = std::sin(theta - phi);
  return std::max(p * c1 * c1, (1.0 - p) * c2 * c2) + std::max(p * s1 * s1, (1.0 - p) * s2 * s2);
}

BinaryClosedForms binary_closed_forms(double theta, double p, double phi) {
  const double c1 = std::cos(phi), s1 = std::sin(phi);
  const double c2 = std::cos(theta - phi), s2 = std::sin(theta - phi);
  BinaryClosedForms r;
  r.prob0 = p * c1 * c1 + (1.0 - p) * c2 * c2;
  r.prob1 = p * s1 * s1 + (1.0 - p) * s2 * s2;
  if (!(r.prob0 > kProbabilityFloor) || !(r.prob1 > kProbabilityFloor)) {
    throw Error(ErrorCode::ZeroProbabilityOutcome,
                fmt::format("outcome probabilities ({}, {})", r.prob0, r.prob1),
                std::min(r.prob0, r.prob1));
  }
  r.posterior0 = p * c1 * c1 / r.prob0;
  r.posterior1 = p * s1 * s1 / r.prob1;
  r.j1 = binary_j1(theta, p, phi);
  r.stop_val = std::max(p, 1.0 - p);
  return r;
}

std::vector<double> default_binary_p_grid() {
  constexpr std::size_t kPoints = 2001;
  constexpr double kOffset = 1e-3;
  std::vector<double> p(kPoints);
  for (std::size_t k = 0; k < kPoints; ++k) {
    p[k] = kOffset + (1.0 - 2.0 * kOffset) * static_cast<double>(k) / (kPoints - 1);
  }
  return p;
}

BinaryGainCurve binary_gain_curve(double theta, std::span<const double> p_grid,
                                  std::span<const double> phi_grid, double measurement_cost) {
  if (p_grid.empty() || phi_grid.empty()) throw Error(ErrorCode::EmptyLibrary, "empty grid");
  BinaryGainCurve curve;
  curve.p.assign(p_grid.begin(), p_grid.end());
  std::optional<Interval> open;
  for (double p : p_grid) {
    double best = -1.0;
    std::size_t best_k = 0;
    for (std::size_t k = 0; k < phi_grid.size(); ++k) {
      const double j = binary_j1(theta, p, phi_grid[k]);
      if (j > best) {
        best = j;
        best_k = k;
      }
    }
    const double g = best - std::max(p, 1.0 - p);
    curve.gain.push_back(g);
    curve.best_phi_index.push_back(best_k);
    if (g > measurement_cost) {
      if (!open) open = Interval{p, p};
      open->second = p;
    } else if (open) {
      curve.measurement_region.push_back(*open);
      open.reset();
    }
  }
  if (open) curve.measurement_region.push_back(*open);
  return curve;
}

BinaryBellmanH2 binary_bellman_h2(double theta, double measurement_cost,
                                  std::span<const double> phi_grid,
                                  std::span<const double> p_grid) {
  if (p_grid.empty() || phi_grid.empty()) throw Error(ErrorCode::EmptyLibrary, "empty grid");
  auto stop = [](double p) { return std::max(p, 1.0 - p); };
  // V_1(p) = max{S(p), sup_phi [-c + sum_o Pr(o) S(p'_o)]}, and sum_o Pr(o) S(p'_o) = J_1(p, phi).
  auto v1 = [&](double p) {
    double best = -std::numeric_limits<double>::infinity();
    for (double phi : phi_grid) best = std::max(best, binary_j1(theta, p, phi));
    return std::max(stop(p), best - measurement_cost);
  };
  BinaryBellmanH2 out;
  out.p.assign(p_grid.begin(), p_grid.end());
  for (double p : p_grid) {
    out.v2.push_back(stop(p));
    out.v1.push_back(v1(p));
    double best = -std::numeric_limits<double>::infinity();
    for (double phi : phi_grid) {
      const double c1 = std::cos(phi), s1 = std::sin(phi);
      const double c2 = std::cos(theta - phi), s2 = std::sin(theta - phi);
      const double w[2][2] = {{p * c1 * c1, (1.0 - p) * c2 * c2}, {p * s1 * s1, (1.0 - p) * s2 * s2}};
      double q = -measurement_cost;
      for (const auto& branch : w) {
        const double pr = branch[0] + branch[1];
        if (!(pr > kProbabilityFloor)) continue;
        q += pr * v1(branch[0] / pr);
      }
      best = std::max(best, q);
    }
    out.v0.push_back(std::max(stop(p), best));
  }
  return out;
}

MeasurementLibrary trine_library(std::size_t count) {
  if (count == 0) throw Error(ErrorCode::EmptyLibrary, "trine library needs >= 1 orientation");
  return family_library(MeasurementFamily::Trine,
                        uniform_parameters(count, family_period(MeasurementFamily::Trine)));
}

LikelihoodTable trine_likelihood_table(const MeasurementLibrary& library) {
  if (library.family() != MeasurementFamily::Trine || !library.params()) {
    throw Error(ErrorCode::MissingParams, "trine table needs a tagged trine library");
  }
  const auto& params = *library.params();
  std::vector<double> values;
  values.reserve(3 * params.size() * 3);
  for (std::size_t i = 0; i < 3; ++i)
    for (double alpha : params)
      for (std::size_t o = 0; o < 3; ++o) values.push_back(trine_likelihood(i, alpha, o));
  return LikelihoodTable(3, params.size(), 3, std::move(values));
}

PlannerConfig trine_config(const TrineScenario& scn, ProjectionMode mode, unsigned threads) {
  auto library = std::make_shared<const MeasurementLibrary>(trine_library(scn.alpha_count));
  auto table = std::make_shared<const LikelihoodTable>(trine_likelihood_table(*library));
  auto grid = std::make_shared<const BeliefGrid>(scn.resolution, 3);
  PlannerConfig cfg(scn.horizon, scn.measurement_cost, std::move(grid), std::move(library),
                    std::move(table), Belief::uniform(3));
  cfg.mode = mode;
  cfg.threads = threads;
  return cfg;
}

namespace {

std::array<double, 3> to_array3(std::span<const double> b) {
  if (b.size() != 3) throw Error(ErrorCode::DimMismatch, "trine maps need M = 3");
  return {b[0], b[1], b[2]};
}

}  // namespace

std::vector<TrineMapRecord> trine_maps(const PlannerConfig& cfg) {
  const auto& grid = *cfg.grid;
  std::vector<TrineMapRecord> out(grid.size());
  parallel_for(grid.size(), resolve_threads(cfg.threads),
               [&](std::size_t begin, std::size_t end, unsigned) {
                 for (std::size_t id = begin; id < end; ++id) {
                   const auto b = grid.weights(id);
                   const auto best = one_step_opt(b, *cfg.table, *cfg.library);
                   auto& r = out[id];
                   r.point = id;
                   r.belief = to_array3(b);
                   std::tie(r.x, r.y) = simplex_embedding(b);
                   r.j1_star = best.value;
                   r.stop_val = stop_val(b);
                   r.gain = best.value - r.stop_val;
                   r.alpha_index = best.action;
                   r.alpha_star = best.orientation.value_or(0.0);
                 }
               });
  return out;
}

RoutingReport trine_routing(const PlannerConfig& cfg, const Belief& start) {
  const auto& table = *cfg.table;
  RoutingReport r;
  r.start = to_array3(start.weights());
  std::tie(r.start_x, r.start_y) = simplex_embedding(start.weights());
  const auto best = one_step_opt(start.weights(), table, *cfg.library);
  r.action = best.action;
  r.orientation = best.orientation.value_or(0.0);
  r.j1_star = best.value;
  r.gain = best.value - stop_val(start);

  const auto probs = obs_prob(start.weights(), best.action, table);
  std::array<double, 3> mixture{};
  double total = 0.0;
  for (std::size_t o = 0; o < probs.size(); ++o) {
    RoutingBranch br;
    br.outcome = o;
    br.probability = probs[o];
    total += probs[o];
    if (probs[o] > kProbabilityFloor) {
      const auto post = bayes_update(start, best.action, o, table);
      br.posterior = to_array3(post.weights());
      std::tie(br.x, br.y) = simplex_embedding(post.weights());
      double s = 0.0;
      for (std::size_t i = 0; i < 3; ++i) {
        mixture[i] += probs[o] * post[i];
        s += post[i];
      }
      r.max_posterior_sum_residual = std::max(r.max_posterior_sum_residual, std::abs(s - 1.0));
    }
    r.branches.push_back(br);
  }
  r.normalization_residual = std::abs(total - 1.0);
  r.consistency_residual = inf_distance(mixture, start.weights());
  return r;
}

TrineHorizonMaps trine_finite_horizon(const PlannerConfig& cfg, CostCounters& counters) {
  if (cfg.horizon != 2) throw Error(ErrorCode::InvalidConfig, "finite-horizon maps need H = 2");
  const auto& grid = *cfg.grid;
  TrineHorizonMaps out{plan(cfg, counters), {}, {}, {}, {}};
  const auto& v = out.tables.values;
  for (std::size_t id = 0; id < grid.size(); ++id) {
    const double s = stop_val(grid.weights(id));
    out.stop_val.push_back(s);
    out.d1.push_back(v(1, id) - s);
    out.d0.push_back(v(0, id) - v(1, id));
  }
  for (std::size_t t = 0; t < cfg.horizon; ++t) {
    const auto row = out.tables.policy.row(t);
    const auto measuring = std::count_if(row.begin(), row.end(),
                                         [](const Action& a) { return !a.is_stop(); });
    out.continuation_fraction.push_back(static_cast<double>(measuring) /
                                        static_cast<double>(grid.size()));
  }
  return out;
}

std::vector<NamedBelief> representative_cases(const PlannerConfig& cfg) {
  std::vector<NamedBelief> cases;
  cases.push_back({"A", Belief::uniform(3)});
  cases.push_back({"B", Belief({0.49, 0.49, 0.02})});
  cases.push_back({"C", Belief({0.90, 0.05, 0.05})});
  cases.push_back({"D", Belief({0.50, 0.30, 0.20})});

  constexpr double kGainTol = 1e-12;
  const auto& grid = *cfg.grid;
  const auto maps = trine_maps(cfg);
  auto interior = [&](std::span<const int> c) {
    return std::all_of(c.begin(), c.end(), [](int x) { return x > 0; });
  };
  for (std::size_t id = 0; id < grid.size(); ++id) {
    const auto c = grid.coords(id);
    if (!interior(c) || !(maps[id].gain > kGainTol)) continue;
    std::vector<int> nb(c.begin(), c.end());
    for (std::size_t i = 0; i < 3; ++i) {
      for (std::size_t j = 0; j < 3; ++j) {
        if (i == j) continue;
        nb.assign(c.begin(), c.end());
        ++nb[i];
        --nb[j];
        const auto other = grid.index_of(nb);
        if (!other || !interior(grid.coords(*other)) || !(maps[*other].gain > kGainTol)) continue;
        if (maps[*other].alpha_index != maps[id].alpha_index) {
          cases.push_back({"E", grid.belief(id)});
          return cases;
        }
      }
    }
  }
  throw Error(ErrorCode::AllDegenerate, "no alpha* switching boundary found on the grid");
}

std::size_t cyclic_shift(const BeliefGrid& grid, std::size_t id) {
  const auto c = grid.coords(id);
  std::vector<int> shifted(c.size());
  shifted[0] = c.back();
  for (std::size_t i = 1; i < c.size(); ++i) shifted[i] = c[i - 1];
  return *grid.index_of(shifted);
}

}  // namespace sqsd
