#include <doctest.h>

#include <cmath>
#include <random>

#include "sqsd/bounds.hpp"
#include "sqsd/case_studies.hpp"
#include "sqsd/error.hpp"
#include "test_support.hpp"

using namespace sqsd;
using sqsd::testing::kPi;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected sqsd::Error");
  return ErrorCode::InvalidConfig;
}

// Covering radius by direct sweep: sup over probes of the distance to the nearest parameter.
double swept_delta_a(const std::vector<double>& params, double period, int probes) {
  double worst = 0.0;
  for (int k = 0; k < probes; ++k) {
    const double x = period * k / probes;
    double nearest = period;
    for (double p : params) {
      const double d = std::abs(x - p);
      nearest = std::min(nearest, std::min(d, period - d));
    }
    worst = std::max(worst, nearest);
  }
  return worst;
}

}  // namespace

TEST_CASE("observation-probability Lipschitz constant") {
  const LikelihoodTable single(3, 1, 1, {1.0, 1.0, 1.0});
  CHECK(obs_prob_lipschitz(single) == 3.0);

  const auto binary = build_likelihood_table(binary_states(kPi / 3), binary_library(31, kPi / 3, true));
  CHECK(obs_prob_lipschitz(binary) <= 2.0);

  // No sampled pair of beliefs shows a larger ratio.
  const auto trine = trine_config(TrineScenario{});
  const double cp = obs_prob_lipschitz(*trine.table);
  CHECK(cp <= 3.0 * 2.0 / 3.0 + 1e-12);
  std::mt19937_64 gen(4);
  double observed = 0.0;
  for (int s = 0; s < 100000; ++s) {
    const auto b1 = sqsd::testing::random_simplex_point(3, gen);
    const auto b2 = sqsd::testing::random_simplex_point(3, gen);
    const std::size_t a = s % trine.table->actions();
    const auto p1 = obs_prob(b1, a, *trine.table);
    const auto p2 = obs_prob(b2, a, *trine.table);
    for (std::size_t o = 0; o < 3; ++o) observed = std::max(observed, std::abs(p1[o] - p2[o]) / inf_distance(b1, b2));
  }
  CHECK(observed <= cp);
  CHECK(observed > 0.5 * cp);
}

TEST_CASE("likelihood action-Lipschitz constants") {
  const auto states = trine_states();
  const auto trine = likelihood_lipschitz(trine_library(24), states);
  REQUIRE(trine.analytic);
  CHECK(*trine.analytic == doctest::Approx(1.0 / 3.0));
  CHECK(trine.finite_difference <= 1.0 / 3.0 + 1e-9);
  CHECK(trine.finite_difference > 0.32);

  const auto bstates = binary_states(kPi / 3);
  const auto binary = likelihood_lipschitz(binary_library(90, kPi / 3, false), bstates);
  CHECK(binary.value() == 1.0);
  CHECK(binary.finite_difference <= 1.0 + 1e-9);
  CHECK(binary.finite_difference > 0.99);

  // A constant family has no action sensitivity.
  std::vector<Povm> same(3, binary_projective_povm(0.4));
  const MeasurementLibrary constant(same, std::vector<double>{0.0, 1.0, 2.0}, MeasurementFamily::Explicit, 3.0);
  CHECK(likelihood_lipschitz(constant, bstates).value() == 0.0);

  const MeasurementLibrary untagged(same, std::nullopt, MeasurementFamily::Explicit, 3.0);
  CHECK(code_of([&] { likelihood_lipschitz(untagged, bstates); }) == ErrorCode::MissingParams);
}

TEST_CASE("nondegeneracy floor") {
  const auto states = binary_states(kPi / 3);
  const auto lib = family_library(MeasurementFamily::Binary, {0.0});
  const auto table = build_likelihood_table(states, lib);
  const std::vector<double> uniform{0.5, 0.5};
  const auto p = obs_prob(uniform, 0, table);
  CHECK(p[0] == doctest::Approx(0.625).epsilon(1e-14));
  CHECK(p[1] == doctest::Approx(0.375).epsilon(1e-14));

  // Enumeration oracle over the N = 2 grid: (0,1), (1/2,1/2), (1,0).
  // At (1,0) the outcome o = 1 has probability 0 and is excluded; (0,1) gives cos^2(pi/3) = 1/4.
  const auto eta = estimate_eta(table, build_grid(2, 2));
  CHECK(eta.eta == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(eta.point == 0);
  CHECK(eta.outcome == 0);

  // theta = pi/2, phi = 0: at p = 1, Pr(o = 1) = 0 is dropped, the rest stays.
  const auto ortho = build_likelihood_table(binary_states(kPi / 2), lib);
  const auto vertex_only = estimate_eta(ortho, build_grid(1, 2));
  CHECK(vertex_only.eta == doctest::Approx(1.0));

  // Trine: the centre contributes 1/3 for every orientation.
  const auto trine = trine_config(TrineScenario{});
  const std::vector<double> centre{1.0 / 3, 1.0 / 3, 1.0 / 3};
  for (std::size_t a = 0; a < trine.table->actions(); ++a)
    for (double v : obs_prob(centre, a, *trine.table)) CHECK(v == doctest::Approx(1.0 / 3).epsilon(1e-12));

  const LikelihoodTable dead(2, 1, 2, {1.0, 0.0, 1.0, 0.0});
  CHECK(code_of([&] { estimate_eta(dead, build_grid(4, 2), 1.5); }) == ErrorCode::AllDegenerate);
}

TEST_CASE("posterior Lipschitz constants") {
  CHECK(posterior_lipschitz_analytic(2.0, 0.5) == doctest::Approx(2.0 / 0.5 + 2.0 / 0.25));
  CHECK(code_of([] { posterior_lipschitz_analytic(1.0, 0.0); }) == ErrorCode::EtaNonPositive);

  const auto cfg = trine_config(TrineScenario{});
  const auto eta = estimate_eta(*cfg.table, *cfg.grid);
  const double analytic = posterior_lipschitz_analytic(obs_prob_lipschitz(*cfg.table), eta.eta);
  const double sampled = posterior_lipschitz_sampled(*cfg.table, 20000, 3);
  CHECK(sampled > 0.0);
  CHECK(sampled <= analytic);
  CHECK(posterior_lipschitz_sampled(*cfg.table, 20000, 3) == sampled);
}

TEST_CASE("belief Lipschitz sequence") {
  const auto flat = belief_lipschitz_sequence(0.0, 0.0, 4, 2);
  CHECK(flat == std::vector<double>(5, 1.0));
  const auto one = belief_lipschitz_sequence(1.0, 1.0, 1, 1);
  CHECK(one == std::vector<double>{2.0, 1.0});

  const auto cfg = trine_config(TrineScenario{60, 60, 0.02, 3});
  const auto consts = regularity_constants(cfg, trine_states(), 2000, 1);
  REQUIRE(consts.belief_lipschitz.size() == 4);
  for (std::size_t t = 0; t + 1 < 4; ++t) CHECK(consts.belief_lipschitz[t] >= consts.belief_lipschitz[t + 1]);
  CHECK(consts.action_lipschitz.size() == 3);
}

TEST_CASE("action Lipschitz sequence") {
  const std::vector<double> l{1.0, 1.0};
  CHECK(action_lipschitz_sequence(0.0, 0.3, l, 2) == std::vector<double>{0.0});
  const auto k = action_lipschitz_sequence(1.0 / 3.0, 1.0 / 3.0, l, 3);
  REQUIRE(k.size() == 1);
  CHECK(k[0] == doctest::Approx(13.0));
  CHECK(code_of([&] { action_lipschitz_sequence(1.0, 0.0, l, 2); }) == ErrorCode::EtaNonPositive);
}

TEST_CASE("library covering radius") {
  const auto uniform24 = uniform_parameters(24, 2 * kPi / 3);
  CHECK(delta_A(uniform24, 2 * kPi / 3) == doctest::Approx((2 * kPi / 3) / 48).epsilon(1e-14));
  CHECK(delta_A(std::vector<double>{0.7}, 2.0) == 1.0);

  // Gaps 0.1, 0.4 and the wrap-around 0.5: half the largest is 0.25.
  const std::vector<double> uneven{0.0, 0.1, 0.5};
  const double swept = swept_delta_a(uneven, 1.0, 1'000'000);
  CHECK(swept == doctest::Approx(0.25).epsilon(1e-6));
  CHECK(delta_A(uneven, 1.0) == doctest::Approx(swept).epsilon(1e-6));

  std::mt19937_64 gen(8);
  std::uniform_real_distribution<double> u(0.0, 3.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> p(1 + trial % 6);
    for (auto& x : p) x = u(gen);
    std::sort(p.begin(), p.end());
    CHECK(std::abs(delta_A(p, 3.0) - swept_delta_a(p, 3.0, 200000)) <= 3.0 / 200000 + 1e-12);
  }
  CHECK(code_of([] { delta_A(std::vector<double>{}, 1.0); }) == ErrorCode::MissingParams);

  CHECK(circular_distance(0.1, 0.9, 1.0) == doctest::Approx(0.2));
  CHECK(circular_distance(0.3, 0.3, 1.0) == 0.0);
}

TEST_CASE("total budget") {
  const std::vector<double> l{7.0, 5.0, 3.0, 1.0};
  const std::vector<double> k{4.0, 2.0, 1.0};
  const auto at_h = total_budget(l, k, 0.1, 0.01, 3);
  CHECK(at_h.total == 0.0);
  CHECK(at_h.arbitrary_total == doctest::Approx(0.01));

  const auto b0 = total_budget(l, k, 0.1, 0.01, 0);
  CHECK(b0.action_term == doctest::Approx(0.1 * 7.0));
  CHECK(b0.belief_term == doctest::Approx(0.01 * 9.0));
  CHECK(b0.total == doctest::Approx(0.79));
  CHECK(b0.arbitrary_total == doctest::Approx(0.79 + 0.07));
  CHECK(b0.uniform_belief_bound == doctest::Approx(3 * 5.0 * 0.01));
  CHECK(b0.uniform_action_bound == doctest::Approx(3 * 4.0 * 0.1));
  REQUIRE(b0.per_stage.size() == 4);
  CHECK(b0.per_stage[1].grid_total == doctest::Approx(0.1 * 3.0 + 0.01 * 4.0));

  // Full family and constant L: the uniform shortcut is exact.
  const std::vector<double> flat(5, 2.0);
  const std::vector<double> kk(4, 9.0);
  const auto u = total_budget(flat, kk, 0.0, 0.03, 1);
  CHECK(u.total == doctest::Approx(3 * 2.0 * 0.03));
  CHECK(u.total == doctest::Approx(u.uniform_belief_bound));

  CHECK(code_of([&] { total_budget(l, l, 0.1, 0.1, 0); }) == ErrorCode::DimMismatch);
  CHECK(code_of([&] { total_budget(l, k, 0.1, 0.1, 4); }) == ErrorCode::OutOfRange);
}

TEST_CASE("budget dominates the error against a fine reference") {
  BinaryScenario scn;
  scn.resolution = 50;
  scn.library_size = 12;
  scn.insert_optimal_angle = false;
  const auto cfg = binary_config(scn);
  CostCounters c;
  const auto tables = plan(cfg, c);
  const auto states = binary_states(scn.theta);
  const auto consts = regularity_constants(cfg, states, 1000, 1);
  const double da = delta_A(*cfg.library->params(), cfg.library->period());
  const auto budget = total_budget(consts.belief_lipschitz, consts.action_lipschitz, da,
                                   0.5 / scn.resolution, 0);

  // The reference uses a dense library and a fine 1-D lattice.
  const auto fine_lib = binary_library(2000, scn.theta, true);
  const auto fine_table = build_likelihood_table(states, fine_lib);
  const int n_ref = 4000;
  const auto ref = exact_1d_oracle(fine_table, scn.horizon, scn.measurement_cost, n_ref);
  double worst = 0.0;
  for (std::size_t id = 0; id < cfg.grid->size(); ++id) {
    const std::size_t ref_id = static_cast<std::size_t>(id * (n_ref / scn.resolution));
    worst = std::max(worst, std::abs(tables.values(0, id) - ref(0, ref_id)));
  }
  CHECK(worst <= budget.total);
}

TEST_CASE("grid values respect the belief Lipschitz constants") {
  BinaryScenario scn;
  scn.resolution = 80;
  scn.library_size = 15;
  const auto cfg = binary_config(scn);
  CostCounters c;
  const auto tables = plan(cfg, c);
  const auto consts = regularity_constants(cfg, binary_states(scn.theta), 1000, 2);
  for (std::size_t t = 0; t <= cfg.horizon; ++t)
    for (std::size_t i = 0; i < cfg.grid->size(); ++i)
      for (std::size_t j = i + 1; j < cfg.grid->size(); ++j) {
        const double ratio = std::abs(tables.values(t, i) - tables.values(t, j)) /
                             inf_distance(cfg.grid->weights(i), cfg.grid->weights(j));
        CHECK(ratio <= consts.belief_lipschitz[t] + 1e-12);
      }
}

TEST_CASE("continuation sensitivity to the orientation stays below K_t") {
  BinaryScenario scn;
  scn.resolution = 60;
  scn.library_size = 36;
  scn.insert_optimal_angle = false;
  const auto cfg = binary_config(scn);
  CostCounters c;
  const auto tables = plan(cfg, c);
  const auto consts = regularity_constants(cfg, binary_states(scn.theta), 1000, 3);
  const auto& params = *cfg.library->params();
  const auto& tab = *cfg.table;
  for (std::size_t t = 0; t < cfg.horizon; ++t)
    for (std::size_t id = 0; id < cfg.grid->size(); ++id) {
      const auto b = cfg.grid->weights(id);
      auto g = [&](std::size_t a) {
        double q = 0.0;
        for (std::size_t o = 0; o < 2; ++o) {
          const double p = b[0] * tab(0, a, o) + b[1] * tab(1, a, o);
          if (p <= 1e-12) continue;
          const std::vector<double> post{b[0] * tab(0, a, o) / p, b[1] * tab(1, a, o) / p};
          q += p * value_at(post, t + 1, tables.values, *cfg.grid);
        }
        return q;
      };
      for (std::size_t a = 0; a + 1 < params.size(); ++a) {
        const double ratio = std::abs(g(a) - g(a + 1)) / (params[a + 1] - params[a]);
        CHECK(ratio <= consts.action_lipschitz[t]);
      }
    }
}

TEST_CASE("complexity report counts") {
  BinaryScenario scn;
  scn.resolution = 10;
  scn.library_size = 2;
  scn.insert_optimal_angle = false;
  scn.horizon = 1;
  auto cfg = binary_config(scn, ProjectionMode::Raw);
  CHECK(code_of([&] { complexity_report(cfg, CostCounters{}); }) == ErrorCode::CountersEmpty);

  CostCounters c;
  (void)plan(cfg, c);
  // Hand count: every (b, a, o) with Pr(o | b, a) <= 1e-12 is skipped.
  std::uint64_t skips = 0;
  for (std::size_t id = 0; id < 11; ++id)
    for (std::size_t a = 0; a < 2; ++a)
      for (double p : obs_prob(cfg.grid->weights(id), a, *cfg.table)) skips += p <= 1e-12;
  const auto report = complexity_report(cfg, c);
  CHECK(report.zero_prob_skips == skips);
  CHECK(c.projection_candidates == (1 * 11 * 2 * 2 - skips) * 11);
  CHECK(report.all_match());
  CHECK(report.leading_term == 1.0 * 2 * 2 * 2 * 11 * 11);

  cfg.mode = ProjectionMode::Memoized;
  cfg.horizon = 3;
  CostCounters cm;
  (void)plan(cfg, cm);
  CHECK(complexity_report(cfg, cm).all_match());
}

TEST_CASE("scaling slope of projection scans") {
  CHECK(loglog_slope(std::vector<double>{1, 2, 4}, std::vector<double>{3, 12, 48}) == doctest::Approx(2.0));
  CHECK(code_of([] { loglog_slope(std::vector<double>{1}, std::vector<double>{1}); }) == ErrorCode::DimMismatch);

  const std::vector<int> ns{20, 40, 80};
  const auto result = scaling_experiment(ns, [](int n) {
    BinaryScenario scn;
    scn.resolution = n;
    scn.library_size = 4;
    scn.horizon = 1;
    return binary_config(scn, ProjectionMode::Raw);
  });
  CHECK(result.runs.size() == 3);
  CHECK(result.candidate_slope == doctest::Approx(2.0).epsilon(0.05));
}
