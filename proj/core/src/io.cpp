#include "sqsd/io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "sqsd/error.hpp"

namespace sqsd {

using json = nlohmann::ordered_json;

std::string format_double(double x) { return fmt::format("{:.17g}", x); }

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t x) { return fmt::format("{:016x}", x); }

std::uint64_t file_hash(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return fnv1a(buf.str());
}

// Tables -------------------------------------------------------------------

void write_tables_csv(std::ostream& os, const PlanTables& tables) {
  os << "stage,point_id,value,action_kind,action_index\n";
  for (std::size_t t = 0; t < tables.values.stages(); ++t) {
    for (std::size_t id = 0; id < tables.values.points(); ++id) {
      const auto& a = tables.policy(t, id);
      os << t << ',' << id << ',' << format_double(tables.values(t, id)) << ','
         << (a.is_stop() ? "stop" : "measure") << ',' << a.index << '\n';
    }
  }
}

PlanTables read_tables_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != "stage,point_id,value,action_kind,action_index") {
    throw Error(ErrorCode::InvalidConfig, "unexpected table CSV header");
  }
  struct Row {
    std::size_t t, id;
    double v;
    Action a;
  };
  std::vector<Row> rows;
  std::size_t max_t = 0, max_id = 0;
  std::size_t line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string t, id, v, kind, index;
    if (!std::getline(ls, t, ',') || !std::getline(ls, id, ',') || !std::getline(ls, v, ',') ||
        !std::getline(ls, kind, ',') || !std::getline(ls, index)) {
      throw Error(ErrorCode::InvalidConfig, fmt::format("table CSV line {} is malformed", line_no));
    }
    Row r{std::stoul(t), std::stoul(id), std::stod(v),
          kind == "stop" ? Action::stop(std::stoul(index)) : Action::measure(std::stoul(index))};
    max_t = std::max(max_t, r.t);
    max_id = std::max(max_id, r.id);
    rows.push_back(r);
  }
  if (rows.empty()) throw Error(ErrorCode::InvalidConfig, "table CSV has no rows");
  PlanTables out{ValueTable(max_t + 1, max_id + 1), PolicyTable(max_t + 1, max_id + 1)};
  if (rows.size() != (max_t + 1) * (max_id + 1)) {
    throw Error(ErrorCode::InvalidConfig, "table CSV is not a full stage x point table");
  }
  for (const auto& r : rows) {
    out.values(r.t, r.id) = r.v;
    out.policy(r.t, r.id) = r.a;
  }
  return out;
}

namespace {

void put_u64(std::ostream& os, std::uint64_t v) {
  unsigned char b[8];
  for (int k = 0; k < 8; ++k) b[k] = static_cast<unsigned char>(v >> (8 * k));
  os.write(reinterpret_cast<const char*>(b), 8);
}

std::uint64_t get_u64(std::istream& is) {
  unsigned char b[8];
  if (!is.read(reinterpret_cast<char*>(b), 8)) {
    throw Error(ErrorCode::InvalidConfig, "truncated golden file");
  }
  std::uint64_t v = 0;
  for (int k = 0; k < 8; ++k) v |= static_cast<std::uint64_t>(b[k]) << (8 * k);
  return v;
}

}  // namespace

void write_values_binary(std::ostream& os, const ValueTable& values, std::size_t hypotheses) {
  put_u64(os, values.stages() - 1);
  put_u64(os, values.points());
  put_u64(os, hypotheses);
  for (double v : values.data()) put_u64(os, std::bit_cast<std::uint64_t>(v));
}

GoldenValues read_values_binary(std::istream& is) {
  GoldenValues g;
  g.horizon = get_u64(is);
  g.points = get_u64(is);
  g.hypotheses = get_u64(is);
  g.values = ValueTable(g.horizon + 1, g.points);
  for (std::size_t t = 0; t <= g.horizon; ++t) {
    for (std::size_t id = 0; id < g.points; ++id) {
      g.values(t, id) = std::bit_cast<double>(get_u64(is));
    }
  }
  return g;
}

void write_grid_csv(std::ostream& os, const BeliefGrid& grid) {
  const auto m = static_cast<std::size_t>(grid.dim());
  os << "point_id";
  for (std::size_t i = 1; i <= m; ++i) os << ",c" << i;
  for (std::size_t i = 1; i <= m; ++i) os << ",b" << i;
  if (m == 3) os << ",x,y";
  os << '\n';
  for (std::size_t id = 0; id < grid.size(); ++id) {
    os << id;
    for (int c : grid.coords(id)) os << ',' << c;
    for (double w : grid.weights(id)) os << ',' << format_double(w);
    if (m == 3) {
      const auto [x, y] = simplex_embedding(grid.weights(id));
      os << ',' << format_double(x) << ',' << format_double(y);
    }
    os << '\n';
  }
}

// Case-study maps -----------------------------------------------------------

void write_trine_maps_csv(std::ostream& os, const std::vector<TrineMapRecord>& maps) {
  os << "point_id,b1,b2,b3,x,y,j1_star,gain,alpha_star,alpha_index,stop_val\n";
  for (const auto& r : maps) {
    os << r.point;
    for (double w : r.belief) os << ',' << format_double(w);
    os << ',' << format_double(r.x) << ',' << format_double(r.y) << ',' << format_double(r.j1_star)
       << ',' << format_double(r.gain) << ',' << format_double(r.alpha_star) << ','
       << r.alpha_index << ',' << format_double(r.stop_val) << '\n';
  }
}

void write_trine_horizon_csv(std::ostream& os, const BeliefGrid& grid,
                             const TrineHorizonMaps& maps) {
  const auto& v = maps.tables.values;
  const auto& pol = maps.tables.policy;
  // alpha index is -1 where the policy stops.
  auto alpha_index = [](const Action& a) {
    return a.is_stop() ? std::string("-1") : std::to_string(a.index);
  };
  os << "point_id,b1,b2,b3,x,y,v0,v1,v2,d1,d0,policy0,policy1,alpha_index0,alpha_index1\n";
  for (std::size_t id = 0; id < grid.size(); ++id) {
    const auto b = grid.weights(id);
    const auto [x, y] = simplex_embedding(b);
    os << id << ',' << format_double(b[0]) << ',' << format_double(b[1]) << ','
       << format_double(b[2]) << ',' << format_double(x) << ',' << format_double(y) << ','
       << format_double(v(0, id)) << ',' << format_double(v(1, id)) << ','
       << format_double(v(2, id)) << ',' << format_double(maps.d1[id]) << ','
       << format_double(maps.d0[id]) << ',' << (pol(0, id).is_stop() ? "stop" : "measure") << ','
       << (pol(1, id).is_stop() ? "stop" : "measure") << ',' << alpha_index(pol(0, id)) << ','
       << alpha_index(pol(1, id)) << '\n';
  }
}

void write_binary_gain_csv(std::ostream& os, const BinaryGainCurve& curve,
                           std::span<const double> phi_grid) {
  os << "p,gain,best_phi\n";
  for (std::size_t k = 0; k < curve.p.size(); ++k) {
    os << format_double(curve.p[k]) << ',' << format_double(curve.gain[k]) << ','
       << format_double(phi_grid[curve.best_phi_index[k]]) << '\n';
  }
}

void write_binary_bellman_csv(std::ostream& os, const BinaryBellmanH2& tables) {
  os << "p,v2,v1,v0\n";
  for (std::size_t k = 0; k < tables.p.size(); ++k) {
    os << format_double(tables.p[k]) << ',' << format_double(tables.v2[k]) << ','
       << format_double(tables.v1[k]) << ',' << format_double(tables.v0[k]) << '\n';
  }
}

// Reports -------------------------------------------------------------------

namespace {

json counters_object(const CostCounters& c) {
  return json{{"stop_evals", c.stop_evals},
              {"obs_evals", c.obs_evals},
              {"posterior_evals", c.posterior_evals},
              {"projections", c.projections},
              {"projection_candidates", c.projection_candidates},
              {"coordinate_comparisons", c.coordinate_comparisons},
              {"lookups", c.lookups},
              {"aggregations", c.aggregations},
              {"actmax", c.actmax},
              {"zero_prob_skips", c.zero_prob_skips},
              {"memo_hits", c.memo_hits},
              {"policy_lookups", c.policy_lookups},
              {"belief_updates", c.belief_updates},
              {"outcome_draws", c.outcome_draws}};
}

json array3(const std::array<double, 3>& a) { return json::array({a[0], a[1], a[2]}); }

}  // namespace

std::string counters_json(const CostCounters& counters) {
  return counters_object(counters).dump(2) + "\n";
}

std::string complexity_json(const ComplexityReport& r, const CostCounters& counters) {
  json checks = json::array();
  for (const auto& c : r.checks) {
    checks.push_back({{"name", c.name}, {"measured", c.measured}, {"predicted", c.predicted},
                      {"match", c.matches()}});
  }
  json j{{"mode", r.mode == ProjectionMode::Raw ? "raw" : "memoized"},
         {"memoized_projection_note",
          "memoized mode computes each Proj_B(tau(b,a,o)) once and reuses it across stages"},
         {"horizon", r.horizon},
         {"grid_points", r.points},
         {"actions", r.actions},
         {"outcomes", r.outcomes},
         {"hypotheses", r.hypotheses},
         {"zero_prob_skips", r.zero_prob_skips},
         {"checks", checks},
         {"all_match", r.all_match()},
         {"symbolic_cost", r.symbolic_cost},
         {"leading_term_H_A_O_M_B2", r.leading_term},
         {"counters", counters_object(counters)}};
  return j.dump(2) + "\n";
}

std::string budget_json(const BudgetReportInput& in) {
  const auto& c = *in.constants;
  json per_stage = json::array();
  for (const auto& s : in.budget.per_stage) {
    per_stage.push_back({{"stage", s.stage}, {"grid_total", s.grid_total},
                         {"arbitrary_total", s.arbitrary_total}});
  }
  json likelihood{{"value", c.likelihood.value()},
                  {"finite_difference", c.likelihood.finite_difference},
                  {"provenance", c.likelihood.analytic ? "analytic" : "sampled"}};
  if (c.likelihood.analytic) likelihood["analytic"] = *c.likelihood.analytic;
  json delta_b{{"value", in.delta_b.value()},
               {"sampled", in.delta_b.sampled},
               {"samples", in.delta_b.samples},
               {"seed", in.delta_b.seed},
               {"provenance", in.delta_b.exact ? "analytic" : "sampled"}};
  if (in.delta_b.exact) delta_b["exact"] = *in.delta_b.exact;

  json j{{"constants",
          {{"obs_prob_lipschitz", {{"value", c.obs_lipschitz}, {"provenance", "analytic"}}},
           {"posterior_lipschitz",
            {{"value", c.posterior_lipschitz},
             {"provenance", "analytic"},
             {"sampled", c.posterior_lipschitz_sampled}}},
           {"likelihood_action_lipschitz", likelihood},
           {"eta",
            {{"value", c.eta.eta},
             {"provenance", "grid minimum"},
             {"floor", kEtaFloor},
             {"point_id", c.eta.point},
             {"action", c.eta.action},
             {"outcome", c.eta.outcome}}},
           {"value_sup", c.value_sup}}},
         {"belief_lipschitz", c.belief_lipschitz},
         {"action_lipschitz", c.action_lipschitz},
         {"delta_B", delta_b},
         {"delta_A", in.delta_a},
         {"budget",
          {{"stage", in.budget.stage},
           {"belief_term", in.budget.belief_term},
           {"action_term", in.budget.action_term},
           {"total", in.budget.total},
           {"arbitrary_belief_term", in.budget.arbitrary_belief_term},
           {"arbitrary_total", in.budget.arbitrary_total},
           {"uniform_belief_bound", in.budget.uniform_belief_bound},
           {"uniform_action_bound", in.budget.uniform_action_bound},
           {"per_stage", per_stage}}}};
  if (in.has_empirical) {
    j["empirical"] = {{"oracle_resolution", in.oracle_resolution},
                      {"max_grid_error", in.empirical_max_error},
                      {"within_budget", in.empirical_max_error <= in.budget.total}};
  }
  return j.dump(2) + "\n";
}

std::string summary_json(const MonteCarloSummary& s, std::string_view config_hash) {
  json j{{"seed", s.seed},
         {"config_hash", config_hash},
         {"episodes", s.episodes},
         {"success_rate", s.success_rate},
         {"success_stderr", s.success_stderr},
         {"mean_stop_time", s.mean_stop_time},
         {"stop_time_stderr", s.stop_time_stderr},
         {"mean_reward", s.mean_reward},
         {"reward_stderr", s.reward_stderr},
         {"stop_time_histogram", s.stop_time_histogram},
         {"online_cost",
          {{"per_step_cost", s.per_step_cost},
           {"base_cost", s.base_cost},
           {"mean_online_ops", s.mean_online_ops},
           {"predicted_online_ops", s.predicted_online_ops},
           {"fitted_slope", s.fitted_slope},
           {"fitted_intercept", s.fitted_intercept}}},
         {"online_counters", counters_object(s.online_totals)}};
  return j.dump(2) + "\n";
}

std::string trace_json_line(std::size_t episode, const EpisodeTrace& trace) {
  json obs = json::array();
  for (const auto& r : trace.outcomes) obs.push_back({r.stage, r.action, r.outcome});
  json beliefs = json::array();
  for (const auto& b : trace.beliefs) beliefs.push_back(std::vector<double>(b.weights().begin(), b.weights().end()));
  json j{{"episode", episode},
         {"hidden", trace.hidden},
         {"outcomes", obs},
         {"beliefs", beliefs},
         {"stop_stage", trace.stop_stage},
         {"declared", trace.declared},
         {"correct", trace.correct},
         {"online_ops", trace.total_ops()}};
  return j.dump() + "\n";
}

std::string routing_json(std::string_view label, const RoutingReport& r) {
  json branches = json::array();
  for (const auto& b : r.branches) {
    json jb{{"outcome", b.outcome}, {"probability", b.probability}};
    if (b.posterior) {
      jb["posterior"] = array3(*b.posterior);
      jb["x"] = b.x;
      jb["y"] = b.y;
    } else {
      jb["posterior"] = nullptr;
    }
    branches.push_back(jb);
  }
  json j{{"case", label},
         {"start", array3(r.start)},
         {"start_x", r.start_x},
         {"start_y", r.start_y},
         {"action", r.action},
         {"orientation", r.orientation},
         {"j1_star", r.j1_star},
         {"gain", r.gain},
         {"branches", branches},
         {"diagnostics",
          {{"normalization_residual", r.normalization_residual},
           {"branch_consistency_residual", r.consistency_residual},
           {"max_posterior_sum_residual", r.max_posterior_sum_residual}}}};
  return j.dump(2) + "\n";
}

// Ensemble files ------------------------------------------------------------

namespace {

ComplexMatrix parse_matrix(const json& entries, const std::string& what) {
  if (!entries.is_array() || entries.empty()) {
    throw Error(ErrorCode::InvalidConfig, what + ": expected a non-empty list of [re, im] pairs");
  }
  const auto n = entries.size();
  const auto dim = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(n))));
  if (static_cast<std::size_t>(dim * dim) != n) {
    throw Error(ErrorCode::NotSquare, fmt::format("{}: {} entries is not a square count", what, n));
  }
  ComplexMatrix m(dim, dim);
  for (std::size_t k = 0; k < n; ++k) {
    const auto& e = entries[k];
    if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number()) {
      throw Error(ErrorCode::InvalidConfig, fmt::format("{}: entry {} is not [re, im]", what, k));
    }
    m(static_cast<Eigen::Index>(k) / dim, static_cast<Eigen::Index>(k) % dim) =
        Complex(e[0].get<double>(), e[1].get<double>());
  }
  return m;
}

Ensemble ensemble_from_json(const json& doc) {
  if (!doc.contains("states") || !doc.contains("prior") || !doc.contains("measurement")) {
    throw Error(ErrorCode::InvalidConfig, "ensemble needs 'states', 'prior' and 'measurement'");
  }
  std::vector<DensityOperator> states;
  for (std::size_t i = 0; i < doc["states"].size(); ++i) {
    states.push_back(validate_density(parse_matrix(doc["states"][i], fmt::format("states[{}]", i))));
  }
  if (states.size() < 2) throw Error(ErrorCode::InvalidConfig, "ensemble needs >= 2 states");
  Belief prior(doc["prior"].get<std::vector<double>>());
  if (prior.size() != states.size()) {
    throw Error(ErrorCode::DimMismatch, "prior length differs from the number of states");
  }

  const auto& meas = doc["measurement"];
  const auto family_name = meas.value("family", std::string{});
  const auto family = parse_family(family_name);
  if (!family) {
    throw Error(ErrorCode::InvalidConfig, fmt::format("unknown measurement family '{}'", family_name));
  }
  std::optional<std::vector<double>> params;
  if (meas.contains("params")) params = meas["params"].get<std::vector<double>>();

  if (*family == MeasurementFamily::Explicit) {
    if (!meas.contains("povms")) throw Error(ErrorCode::InvalidConfig, "explicit family needs 'povms'");
    std::vector<Povm> povms;
    for (std::size_t a = 0; a < meas["povms"].size(); ++a) {
      std::vector<ComplexMatrix> effects;
      for (std::size_t o = 0; o < meas["povms"][a].size(); ++o) {
        effects.push_back(parse_matrix(meas["povms"][a][o], fmt::format("povms[{}][{}]", a, o)));
      }
      povms.push_back(validate_povm(std::move(effects)));
    }
    const double period = meas.value("period", family_period(MeasurementFamily::Explicit));
    return {std::move(states), std::move(prior),
            MeasurementLibrary(std::move(povms), std::move(params), *family, period)};
  }
  if (!params) {
    if (!meas.contains("count")) {
      throw Error(ErrorCode::MissingParams, "family library needs 'params' or 'count'");
    }
    params = uniform_parameters(meas["count"].get<std::size_t>(), family_period(*family));
  }
  return {std::move(states), std::move(prior), family_library(*family, std::move(*params))};
}

}  // namespace

Ensemble parse_ensemble(std::string_view json_text) {
  try {
    return ensemble_from_json(json::parse(json_text));
  } catch (const json::exception& e) {
    // Wrong value types surface here as well as syntax errors.
    throw Error(ErrorCode::InvalidConfig, fmt::format("ensemble JSON: {}", e.what()));
  }
}

Ensemble load_ensemble(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidConfig, fmt::format("cannot open {}", path.string()));
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_ensemble(buf.str());
}

}  // namespace sqsd
