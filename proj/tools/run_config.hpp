#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sqsd/planner.hpp"
#include "sqsd/quantum.hpp"

namespace sqsd::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitConfig = 2,
  kExitSizeOverflow = 3,
  kExitHashMismatch = 4,
};

/// Raised by the front end with a ready-to-print message and the exit code to use.
class CliError : public std::runtime_error {
 public:
  CliError(int code, const std::string& message) : std::runtime_error(message), code_(code) {}
  int code() const noexcept { return code_; }

 private:
  int code_;
};

enum class Scenario { Binary, Trine, Ensemble };

struct RunConfig {
  std::string command;
  Scenario scenario = Scenario::Binary;
  double theta = 1.0471975511965976;
  double prior = 0.5;
  bool insert_optimal = true;
  std::optional<std::size_t> horizon;
  std::optional<int> grid;
  std::optional<std::size_t> library;
  std::optional<double> cost;
  ProjectionMode mode = ProjectionMode::Memoized;
  unsigned threads = 1;
  std::size_t episodes = 10'000;
  std::uint64_t seed = 1;
  std::size_t traces = 0;
  std::string case_label = "all";
  std::vector<int> grids{50, 100, 200, 400};
  std::filesystem::path ensemble;
  std::filesystem::path tables;
  int oracle_grid = 20'000;
  std::size_t samples = 20'000;
  std::filesystem::path out;

  // Filled by resolve().
  std::string ensemble_hash;

  std::size_t horizon_or(std::size_t fallback) const { return horizon.value_or(fallback); }
  int grid_value() const;
  std::size_t library_value() const;
  double cost_value() const;
};

/// Options a command accepts, as long-flag names without dashes.
const std::vector<std::string>& command_keys(const std::string& command);

/// Applies `key = value` to the config; throws std::invalid_argument on a bad value.
void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value);

/// Parses a `key = value` file (# comments, blank lines) for `command`.
/// Diagnostics carry the file name and line number.
std::vector<std::pair<std::string, std::string>> read_config_file(const std::filesystem::path& path,
                                                                  const std::string& command);

/// Checks cross-field constraints, loads the ensemble hash and the output root.
void resolve(RunConfig& cfg);

/// Canonical JSON of every field that influences data artifacts (no paths, no thread count).
std::string canonical_config_json(const RunConfig& cfg);
/// Hash of the fields that determine the planning tables.
std::string plan_hash(const RunConfig& cfg);
/// Hash of canonical_config_json.
std::string config_hash(const RunConfig& cfg);

/// Planner configuration for the scenario at resolution `grid`.
PlannerConfig planner_config(const RunConfig& cfg, int grid, std::size_t horizon);

/// Hypothesis states of the scenario.
std::vector<DensityOperator> scenario_states(const RunConfig& cfg);

std::string scenario_name(Scenario s);

}  // namespace sqsd::cli
