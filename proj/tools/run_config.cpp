#include "run_config.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "sqsd/case_studies.hpp"
#include "sqsd/error.hpp"
#include "sqsd/io.hpp"

namespace sqsd::cli {

using json = nlohmann::json;

namespace {

const std::vector<std::string> kCommon{"scenario", "theta",   "prior", "insert-optimal", "grid",
                                       "library",  "cost",    "horizon", "mode",         "threads",
                                       "seed",     "ensemble", "samples", "out"};

std::vector<std::string> with(std::vector<std::string> extra) {
  auto keys = kCommon;
  keys.insert(keys.end(), extra.begin(), extra.end());
  return keys;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(const std::string& value) {
  std::istringstream in(value);
  T x{};
  in >> x;
  if (!in || !in.eof()) throw std::invalid_argument(fmt::format("invalid number '{}'", value));
  return x;
}

std::size_t parse_count(const std::string& value) {
  if (value.empty() || value.front() == '-') {
    throw std::invalid_argument(fmt::format("expected a non-negative integer, got '{}'", value));
  }
  const double as_double = parse_number<double>(value);
  if (as_double != std::floor(as_double) || as_double > 1e15) {
    throw std::invalid_argument(fmt::format("expected a non-negative integer, got '{}'", value));
  }
  return static_cast<std::size_t>(as_double);
}

bool parse_bool(const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw std::invalid_argument(fmt::format("expected true or false, got '{}'", value));
}

std::string hash_of(const json& j) { return hex64(fnv1a(j.dump())); }

}  // namespace

std::string scenario_name(Scenario s) {
  switch (s) {
    case Scenario::Binary: return "binary";
    case Scenario::Trine: return "trine";
    case Scenario::Ensemble: return "ensemble";
  }
  return "?";
}

int RunConfig::grid_value() const {
  if (grid) return *grid;
  return scenario == Scenario::Trine ? 60 : 200;
}

std::size_t RunConfig::library_value() const {
  if (library) return *library;
  return scenario == Scenario::Trine ? 24 : 181;
}

double RunConfig::cost_value() const {
  if (cost) return *cost;
  return scenario == Scenario::Trine ? 0.02 : 0.01;
}

const std::vector<std::string>& command_keys(const std::string& command) {
  static const std::map<std::string, std::vector<std::string>> keys{
      {"plan", with({})},
      {"simulate", with({"episodes", "traces", "tables"})},
      {"maps", with({})},
      {"routing", with({"case"})},
      {"bounds", with({"oracle-grid"})},
      {"scaling", with({"grids"})},
  };
  return keys.at(command);
}

void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "scenario") {
    if (value == "binary") cfg.scenario = Scenario::Binary;
    else if (value == "trine") cfg.scenario = Scenario::Trine;
    else if (value == "ensemble") cfg.scenario = Scenario::Ensemble;
    else throw std::invalid_argument(fmt::format("unknown scenario '{}' (binary|trine|ensemble)", value));
  } else if (key == "theta") {
    cfg.theta = parse_number<double>(value);
  } else if (key == "prior") {
    cfg.prior = parse_number<double>(value);
  } else if (key == "insert-optimal") {
    cfg.insert_optimal = parse_bool(value);
  } else if (key == "horizon") {
    cfg.horizon = parse_count(value);
  } else if (key == "grid") {
    cfg.grid = static_cast<int>(parse_count(value));
  } else if (key == "library") {
    cfg.library = parse_count(value);
  } else if (key == "cost") {
    cfg.cost = parse_number<double>(value);
  } else if (key == "mode") {
    if (value == "raw") cfg.mode = ProjectionMode::Raw;
    else if (value == "memoized") cfg.mode = ProjectionMode::Memoized;
    else throw std::invalid_argument(fmt::format("unknown mode '{}' (raw|memoized)", value));
  } else if (key == "threads") {
    cfg.threads = static_cast<unsigned>(parse_count(value));
  } else if (key == "episodes") {
    cfg.episodes = parse_count(value);
  } else if (key == "seed") {
    cfg.seed = parse_number<std::uint64_t>(value);
  } else if (key == "traces") {
    cfg.traces = parse_count(value);
  } else if (key == "case") {
    if (value != "all" && !(value.size() == 1 && value[0] >= 'A' && value[0] <= 'E')) {
      throw std::invalid_argument(fmt::format("unknown case '{}' (A..E or all)", value));
    }
    cfg.case_label = value;
  } else if (key == "grids") {
    cfg.grids.clear();
    std::stringstream in(value);
    std::string item;
    while (std::getline(in, item, ',')) cfg.grids.push_back(static_cast<int>(parse_count(trim(item))));
    if (cfg.grids.empty()) throw std::invalid_argument("empty grid list");
  } else if (key == "ensemble") {
    cfg.ensemble = value;
  } else if (key == "tables") {
    cfg.tables = value;
  } else if (key == "oracle-grid") {
    cfg.oracle_grid = static_cast<int>(parse_count(value));
  } else if (key == "samples") {
    cfg.samples = parse_count(value);
  } else if (key == "out") {
    cfg.out = value;
  } else {
    throw std::invalid_argument(fmt::format("unknown key '{}'", key));
  }
}

std::vector<std::pair<std::string, std::string>> read_config_file(const std::filesystem::path& path,
                                                                  const std::string& command) {
  std::ifstream in(path);
  if (!in) throw CliError(kExitConfig, fmt::format("{}: cannot open config file", path.string()));
  const auto& allowed = command_keys(command);
  std::vector<std::pair<std::string, std::string>> entries;
  std::string line;
  for (int lineno = 1; std::getline(in, line); ++lineno) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw CliError(kExitConfig, fmt::format("{}:{}: expected 'key = value'", path.string(), lineno));
    }
    auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (key.starts_with("--")) key.erase(0, 2);
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw CliError(kExitConfig, fmt::format("{}:{}: unknown key '{}' for '{}'", path.string(),
                                              lineno, key, command));
    }
    RunConfig probe;
    try {
      apply_setting(probe, key, value);
    } catch (const std::invalid_argument& e) {
      throw CliError(kExitConfig, fmt::format("{}:{}: {}: {}", path.string(), lineno, key, e.what()));
    }
    entries.emplace_back(key, value);
  }
  return entries;
}

void resolve(RunConfig& cfg) {
  auto fail = [](const std::string& msg) { throw CliError(kExitConfig, msg); };
  if (cfg.scenario == Scenario::Binary && !(cfg.theta > 0.0 && cfg.theta < 0.5 * std::numbers::pi)) {
    fail(fmt::format("--theta: {} is not in (0, pi/2)", cfg.theta));
  }
  if (!(cfg.prior > 0.0 && cfg.prior < 1.0)) fail(fmt::format("--prior: {} is not in (0, 1)", cfg.prior));
  if (cfg.grid_value() < 1) fail("--grid: resolution must be >= 1");
  if (cfg.library_value() < 1) fail("--library: need at least one measurement");
  if (!(cfg.cost_value() >= 0.0) || !std::isfinite(cfg.cost_value())) fail("--cost: must be finite and >= 0");
  if (cfg.threads < 1) fail("--threads: must be >= 1");
  for (int n : cfg.grids) {
    if (n < 1) fail("--grids: resolutions must be >= 1");
  }
  if (cfg.scenario == Scenario::Ensemble) {
    if (cfg.ensemble.empty()) fail("--ensemble: required for scenario 'ensemble'");
    if (!std::filesystem::exists(cfg.ensemble)) fail(fmt::format("--ensemble: {} does not exist", cfg.ensemble.string()));
    cfg.ensemble_hash = hex64(file_hash(cfg.ensemble));
  }
  if (!cfg.tables.empty() && !std::filesystem::is_directory(cfg.tables)) {
    fail(fmt::format("--tables: {} is not a directory", cfg.tables.string()));
  }
  if (cfg.out.empty()) cfg.out = std::filesystem::path("sqsd-out") / cfg.command;
  if (cfg.out.is_relative()) {
    if (const char* root = std::getenv("SQSD_OUTPUT_ROOT"); root && *root) cfg.out = std::filesystem::path(root) / cfg.out;
  }
}

namespace {

json plan_fields(const RunConfig& cfg) {
  json j{{"scenario", scenario_name(cfg.scenario)},
         {"grid", cfg.grid_value()},
         {"cost", cfg.cost_value()},
         {"horizon", cfg.horizon_or(0)}};
  switch (cfg.scenario) {
    case Scenario::Binary:
      j["theta"] = cfg.theta;
      j["prior"] = cfg.prior;
      j["library"] = cfg.library_value();
      j["insert_optimal"] = cfg.insert_optimal;
      break;
    case Scenario::Trine:
      j["library"] = cfg.library_value();
      break;
    case Scenario::Ensemble:
      j["ensemble_fnv1a"] = cfg.ensemble_hash;
      break;
  }
  return j;
}

}  // namespace

std::string canonical_config_json(const RunConfig& cfg) {
  json j = plan_fields(cfg);
  j["command"] = cfg.command;
  j["mode"] = cfg.mode == ProjectionMode::Raw ? "raw" : "memoized";
  j["seed"] = cfg.seed;
  j["samples"] = cfg.samples;
  if (cfg.command == "simulate") {
    j["episodes"] = cfg.episodes;
    j["traces"] = cfg.traces;
  } else if (cfg.command == "routing") {
    j["case"] = cfg.case_label;
  } else if (cfg.command == "bounds") {
    j["oracle_grid"] = cfg.oracle_grid;
  } else if (cfg.command == "scaling") {
    j["grids"] = cfg.grids;
    j.erase("grid");
  }
  json doc{{"config", j}, {"plan_hash", plan_hash(cfg)}};
  doc["config_hash"] = hash_of(j);
  return doc.dump(2) + "\n";
}

std::string plan_hash(const RunConfig& cfg) { return hash_of(plan_fields(cfg)); }

std::string config_hash(const RunConfig& cfg) {
  return json::parse(canonical_config_json(cfg))["config_hash"].get<std::string>();
}

std::vector<DensityOperator> scenario_states(const RunConfig& cfg) {
  switch (cfg.scenario) {
    case Scenario::Binary: return binary_states(cfg.theta);
    case Scenario::Trine: return trine_states();
    case Scenario::Ensemble: return load_ensemble(cfg.ensemble).states;
  }
  return {};
}

PlannerConfig planner_config(const RunConfig& cfg, int grid, std::size_t horizon) {
  switch (cfg.scenario) {
    case Scenario::Binary: {
      BinaryScenario scn;
      scn.theta = cfg.theta;
      scn.library_size = cfg.library_value();
      scn.insert_optimal_angle = cfg.insert_optimal;
      scn.resolution = grid;
      scn.measurement_cost = cfg.cost_value();
      scn.horizon = horizon;
      scn.prior_first = cfg.prior;
      return binary_config(scn, cfg.mode, cfg.threads);
    }
    case Scenario::Trine: {
      TrineScenario scn;
      scn.alpha_count = cfg.library_value();
      scn.resolution = grid;
      scn.measurement_cost = cfg.cost_value();
      scn.horizon = horizon;
      return trine_config(scn, cfg.mode, cfg.threads);
    }
    case Scenario::Ensemble: {
      auto ens = load_ensemble(cfg.ensemble);
      const int m = static_cast<int>(ens.states.size());
      auto library = std::make_shared<const MeasurementLibrary>(std::move(ens.library));
      auto table = std::make_shared<const LikelihoodTable>(build_likelihood_table(ens.states, *library));
      PlannerConfig pc(horizon, cfg.cost_value(), std::make_shared<const BeliefGrid>(grid, m),
                       std::move(library), std::move(table), std::move(ens.prior));
      pc.mode = cfg.mode;
      pc.threads = cfg.threads;
      return pc;
    }
  }
  throw Error(ErrorCode::InvalidConfig, "unknown scenario");
}

}  // namespace sqsd::cli
