#include "commands.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "artifacts.hpp"
#include "sqsd/bounds.hpp"
#include "sqsd/case_studies.hpp"
#include "sqsd/error.hpp"
#include "sqsd/executor.hpp"
#include "sqsd/io.hpp"
#include "sqsd/planner.hpp"

namespace sqsd::cli {

using json = nlohmann::json;

namespace {

template <typename Fn>
std::string render(Fn&& fn) {
  std::ostringstream os;
  fn(os);
  return os.str();
}

ArtifactWriter open_writer(const RunConfig& cfg) {
  ArtifactWriter w(cfg.out, cfg.command, config_hash(cfg));
  w.write("config.json", canonical_config_json(cfg));
  return w;
}

struct BudgetResult {
  RegularityConstants constants;
  DeltaBEstimate delta_b;
  double delta_a = 0.0;
  ErrorBudget budget;
};

BudgetResult compute_budget(const RunConfig& cfg, const PlannerConfig& pc) {
  BudgetResult r;
  const auto states = scenario_states(cfg);
  r.constants = regularity_constants(pc, states, cfg.samples, cfg.seed);
  r.delta_b = estimate_delta_B(*pc.grid, cfg.samples, cfg.seed);
  r.delta_a = delta_A(*pc.library->params(), pc.library->period());
  r.budget = total_budget(r.constants.belief_lipschitz, r.constants.action_lipschitz, r.delta_a,
                          r.delta_b.value(), 0);
  return r;
}

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw CliError(kExitHashMismatch, fmt::format("{}: missing", path.string()));
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw CliError(kExitHashMismatch, fmt::format("{}: unreadable ({})", path.string(), e.what()));
  }
}

/// Loads tables written by `plan`, refusing them unless both the planning hash
/// and the recorded file hash match.
PlanTables load_checked_tables(const RunConfig& cfg, const PlannerConfig& pc) {
  const auto stored = read_json(cfg.tables / "config.json");
  const auto expected = plan_hash(cfg);
  const auto found = stored.value("plan_hash", std::string{});
  if (found != expected) {
    throw CliError(kExitHashMismatch,
                   fmt::format("tables in {} were planned for plan_hash {}, this config gives {}",
                               cfg.tables.string(), found, expected));
  }
  const auto manifest = read_json(cfg.tables / "manifest.json");
  std::string recorded;
  for (const auto& a : manifest.value("artifacts", json::array())) {
    if (a.value("file", "") == "tables.csv") recorded = a.value("fnv1a", "");
  }
  const auto actual = hex64(file_hash(cfg.tables / "tables.csv"));
  if (recorded != actual) {
    throw CliError(kExitHashMismatch, fmt::format("tables.csv hash {} does not match manifest entry '{}'",
                                                  actual, recorded));
  }
  std::ifstream in(cfg.tables / "tables.csv");
  auto tables = read_tables_csv(in);
  if (tables.values.stages() != pc.horizon + 1 || tables.values.points() != pc.grid->size()) {
    throw CliError(kExitHashMismatch, "table shape does not match the configuration");
  }
  return tables;
}

}  // namespace

int cmd_plan(const RunConfig& cfg) {
  const auto pc = planner_config(cfg, cfg.grid_value(), *cfg.horizon);
  auto w = open_writer(cfg);
  CostCounters counters;
  const auto tables = plan(pc, counters);

  w.write("tables.csv", render([&](std::ostream& os) { write_tables_csv(os, tables); }));
  w.write("values.bin",
          render([&](std::ostream& os) { write_values_binary(os, tables.values, pc.hypotheses()); }));
  w.write("grid.csv", render([&](std::ostream& os) { write_grid_csv(os, *pc.grid); }));
  w.write("counters.json", counters_json(counters));
  const auto report = complexity_report(pc, counters);
  w.write("complexity.json", complexity_json(report, counters));

  if (pc.library->params()) {
    const auto b = compute_budget(cfg, pc);
    BudgetReportInput in;
    in.constants = &b.constants;
    in.delta_b = b.delta_b;
    in.delta_a = b.delta_a;
    in.budget = b.budget;
    w.write("budget.json", budget_json(in));
  } else {
    w.note("budget.json skipped: the measurement library has no parameter tags");
  }
  w.finish();

  fmt::print("plan: {} grid points, {} actions, V_0(prior) = {}, counts match = {}\n", pc.grid->size(),
             pc.actions(), format_double(value_at(pc.prior.weights(), 0, tables.values, *pc.grid)),
             report.all_match());
  fmt::print("wrote {}\n", w.dir().string());
  return kExitOk;
}

int cmd_simulate(const RunConfig& cfg) {
  const auto pc = planner_config(cfg, cfg.grid_value(), *cfg.horizon);
  PlanTables tables;
  if (!cfg.tables.empty()) {
    tables = load_checked_tables(cfg, pc);
  } else {
    CostCounters counters;
    tables = plan(pc, counters);
  }
  auto w = open_writer(cfg);
  const auto summary = monte_carlo(pc, tables, cfg.episodes, cfg.seed, cfg.threads);
  w.write("summary.json", summary_json(summary, config_hash(cfg)));
  if (cfg.traces > 0) {
    std::string lines;
    for (std::size_t k = 0; k < std::min(cfg.traces, cfg.episodes); ++k) {
      auto rng = CounterRng::substream(cfg.seed, k);
      lines += trace_json_line(k, run_episode(pc, tables, rng));
    }
    w.write("traces.jsonl", lines);
  }
  w.finish();
  fmt::print("simulate: {} episodes, success {} +- {}, E[tau] = {}\n", summary.episodes,
             format_double(summary.success_rate), format_double(summary.success_stderr),
             format_double(summary.mean_stop_time));
  fmt::print("wrote {}\n", w.dir().string());
  return kExitOk;
}

int cmd_maps(const RunConfig& cfg) {
  const std::size_t horizon = *cfg.horizon;
  if (cfg.scenario == Scenario::Ensemble) {
    throw CliError(kExitConfig, "maps: scenario must be binary or trine");
  }
  auto w = open_writer(cfg);
  json summary;
  if (cfg.scenario == Scenario::Trine) {
    const auto pc = planner_config(cfg, cfg.grid_value(), horizon);
    const auto maps = trine_maps(pc);
    w.write("grid.csv", render([&](std::ostream& os) { write_grid_csv(os, *pc.grid); }));
    w.write("trine_maps.csv", render([&](std::ostream& os) { write_trine_maps_csv(os, maps); }));
    const auto top = std::max_element(maps.begin(), maps.end(),
                                      [](const auto& a, const auto& b) { return a.gain < b.gain; });
    summary["max_gain"] = top->gain;
    summary["max_gain_point"] = top->point;
    if (horizon == 2) {
      CostCounters counters;
      const auto hm = trine_finite_horizon(pc, counters);
      w.write("trine_horizon.csv",
              render([&](std::ostream& os) { write_trine_horizon_csv(os, *pc.grid, hm); }));
      summary["continuation_fraction"] = hm.continuation_fraction;
      summary["min_d1"] = *std::min_element(hm.d1.begin(), hm.d1.end());
      summary["min_d0"] = *std::min_element(hm.d0.begin(), hm.d0.end());
    } else {
      w.note("trine_horizon.csv needs --horizon 2");
    }
  } else {
    const auto library = binary_library(cfg.library_value(), cfg.theta, cfg.insert_optimal);
    const auto& phis = *library.params();
    const auto pgrid = default_binary_p_grid();
    const auto curve = binary_gain_curve(cfg.theta, pgrid, phis, cfg.cost_value());
    w.write("binary_gain.csv", render([&](std::ostream& os) { write_binary_gain_csv(os, curve, phis); }));
    const auto bellman = binary_bellman_h2(cfg.theta, cfg.cost_value(), phis, pgrid);
    w.write("binary_bellman_h2.csv", render([&](std::ostream& os) { write_binary_bellman_csv(os, bellman); }));
    json regions = json::array();
    for (const auto& [lo, hi] : curve.measurement_region) regions.push_back({lo, hi});
    summary["measurement_region"] = regions;
    summary["max_gain"] = *std::max_element(curve.gain.begin(), curve.gain.end());
  }
  w.write("maps_summary.json", summary.dump(2) + "\n");
  w.finish();
  fmt::print("maps: {}\n", summary.dump());
  fmt::print("wrote {}\n", w.dir().string());
  return kExitOk;
}

int cmd_routing(const RunConfig& cfg) {
  if (cfg.scenario != Scenario::Trine) throw CliError(kExitConfig, "routing: scenario must be trine");
  const auto pc = planner_config(cfg, cfg.grid_value(), *cfg.horizon);
  auto w = open_writer(cfg);
  std::string doc = "[\n";
  bool first = true;
  for (const auto& c : representative_cases(pc)) {
    if (cfg.case_label != "all" && c.label != cfg.case_label) continue;
    const auto report = trine_routing(pc, c.belief);
    doc += (first ? "" : ",\n") + routing_json(c.label, report);
    first = false;
    std::string probs;
    for (const auto& b : report.branches) probs += " " + format_double(b.probability);
    fmt::print("case {}: action {} (alpha {}), branch probabilities{}\n", c.label, report.action,
               format_double(report.orientation), probs);
  }
  doc += "]\n";
  w.write("routing.json", doc);
  w.finish();
  fmt::print("wrote {}\n", w.dir().string());
  return kExitOk;
}

int cmd_bounds(const RunConfig& cfg) {
  const auto pc = planner_config(cfg, cfg.grid_value(), *cfg.horizon);
  if (!pc.library->params()) {
    throw CliError(kExitConfig, "bounds: the measurement library needs parameter tags");
  }
  auto w = open_writer(cfg);
  CostCounters counters;
  const auto tables = plan(pc, counters);
  const auto b = compute_budget(cfg, pc);
  BudgetReportInput in;
  in.constants = &b.constants;
  in.delta_b = b.delta_b;
  in.delta_a = b.delta_a;
  in.budget = b.budget;

  json stages = json::array();
  if (pc.hypotheses() == 2) {
    const int n = pc.grid->resolution();
    if (cfg.oracle_grid % n != 0) {
      throw CliError(kExitConfig, fmt::format("--oracle-grid: {} is not a multiple of --grid {}",
                                              cfg.oracle_grid, n));
    }
    // The oracle uses the same library, so the comparison isolates belief discretization.
    const auto oracle = exact_1d_oracle(*pc.table, pc.horizon, pc.measurement_cost, cfg.oracle_grid);
    const std::size_t ratio = static_cast<std::size_t>(cfg.oracle_grid / n);
    double worst = 0.0;
    for (std::size_t t = 0; t <= pc.horizon; ++t) {
      double stage_worst = 0.0;
      for (std::size_t id = 0; id < pc.grid->size(); ++id) {
        // Grid id counts the first coordinate, the oracle lattice index does too.
        const std::size_t ref = static_cast<std::size_t>(pc.grid->coords(id)[0]) * ratio;
        stage_worst = std::max(stage_worst, std::abs(tables.values(t, id) - oracle(t, ref)));
      }
      worst = std::max(worst, stage_worst);
      stages.push_back({{"stage", t},
                        {"max_grid_error", stage_worst},
                        {"grid_budget", b.budget.per_stage[t].grid_total},
                        {"within_budget", stage_worst <= b.budget.per_stage[t].grid_total}});
    }
    in.has_empirical = true;
    in.empirical_max_error = worst;
    in.oracle_resolution = cfg.oracle_grid;
  } else {
    w.note("empirical comparison needs two hypotheses; budget only");
  }
  w.write("budget.json", budget_json(in));
  if (!stages.empty()) w.write("stage_errors.json", stages.dump(2) + "\n");
  w.finish();
  fmt::print("bounds: total budget {}, delta_B {}, delta_A {}", format_double(b.budget.total),
             format_double(b.delta_b.value()), format_double(b.delta_a));
  if (in.has_empirical) fmt::print(", empirical max error {}", format_double(in.empirical_max_error));
  fmt::print("\nwrote {}\n", w.dir().string());
  return kExitOk;
}

int cmd_scaling(const RunConfig& cfg) {
  auto w = open_writer(cfg);
  const auto result = scaling_experiment(
      cfg.grids, [&](int n) { return planner_config(cfg, n, *cfg.horizon); });
  std::string csv =
      "resolution,points,projections,projection_candidates,predicted_candidates,coordinate_comparisons,"
      "zero_prob_skips,counts_match\n";
  for (const auto& run : result.runs) {
    const auto pc = planner_config(cfg, run.resolution, *cfg.horizon);
    const auto report = complexity_report(pc, run.counters);
    std::uint64_t predicted = 0;
    for (const auto& c : report.checks) {
      if (c.name == "projection_candidates") predicted = c.predicted;
    }
    csv += fmt::format("{},{},{},{},{},{},{},{}\n", run.resolution, run.points, run.counters.projections,
                       run.counters.projection_candidates, predicted,
                       run.counters.coordinate_comparisons, run.counters.zero_prob_skips,
                       report.all_match() ? "true" : "false");
    fmt::print("N = {}: |B| = {}, candidates = {}, {:.3f} s\n", run.resolution, run.points,
               run.counters.projection_candidates, run.seconds);
  }
  w.write("scaling.csv", csv);
  json summary{{"mode", cfg.mode == ProjectionMode::Raw ? "raw" : "memoized"},
               {"horizon", *cfg.horizon},
               {"resolutions", cfg.grids},
               {"candidate_slope", result.candidate_slope}};
  w.write("scaling.json", summary.dump(2) + "\n");
  w.finish();
  fmt::print("scaling: log-log slope of candidates vs |B| = {}\n", format_double(result.candidate_slope));
  fmt::print("wrote {}\n", w.dir().string());
  return kExitOk;
}

}  // namespace sqsd::cli
