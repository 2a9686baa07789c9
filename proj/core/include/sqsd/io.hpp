#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "sqsd/belief.hpp"
#include "sqsd/bounds.hpp"
#include "sqsd/case_studies.hpp"
#include "sqsd/executor.hpp"
#include "sqsd/planner.hpp"
#include "sqsd/quantum.hpp"

namespace sqsd {

/// Round-trip-safe decimal: 17 significant digits.
std::string format_double(double x);

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view bytes);
std::string hex64(std::uint64_t x);
std::uint64_t file_hash(const std::filesystem::path& path);

// Tables -------------------------------------------------------------------

/// CSV columns: stage, point_id, value, action_kind (stop|measure), action_index.
void write_tables_csv(std::ostream& os, const PlanTables& tables);
PlanTables read_tables_csv(std::istream& is);

/// Little-endian golden layout: uint64 H, uint64 |B|, uint64 M, then the
/// (H+1) x |B| values as row-major IEEE-754 doubles.
void write_values_binary(std::ostream& os, const ValueTable& values, std::size_t hypotheses);

struct GoldenValues {
  std::size_t horizon = 0;
  std::size_t points = 0;
  std::size_t hypotheses = 0;
  ValueTable values;
};
GoldenValues read_values_binary(std::istream& is);

/// CSV columns: point_id, c1..cM, b1..bM, and x, y when M = 3.
void write_grid_csv(std::ostream& os, const BeliefGrid& grid);

// Case-study maps -----------------------------------------------------------

void write_trine_maps_csv(std::ostream& os, const std::vector<TrineMapRecord>& maps);
void write_trine_horizon_csv(std::ostream& os, const BeliefGrid& grid, const TrineHorizonMaps& maps);
void write_binary_gain_csv(std::ostream& os, const BinaryGainCurve& curve,
                           std::span<const double> phi_grid);
void write_binary_bellman_csv(std::ostream& os, const BinaryBellmanH2& tables);

// Reports (JSON text) -------------------------------------------------------

std::string counters_json(const CostCounters& counters);
std::string complexity_json(const ComplexityReport& report, const CostCounters& counters);

struct BudgetReportInput {
  const RegularityConstants* constants = nullptr;
  DeltaBEstimate delta_b;
  double delta_a = 0.0;
  ErrorBudget budget;
  /// Optional empirical comparison against a fine reference oracle (M = 2).
  bool has_empirical = false;
  double empirical_max_error = 0.0;
  int oracle_resolution = 0;
};
std::string budget_json(const BudgetReportInput& input);

std::string summary_json(const MonteCarloSummary& summary, std::string_view config_hash);
std::string trace_json_line(std::size_t episode, const EpisodeTrace& trace);
std::string routing_json(std::string_view label, const RoutingReport& report);

// Ensemble definition files -------------------------------------------------

struct Ensemble {
  std::vector<DensityOperator> states;
  Belief prior;
  MeasurementLibrary library;
};

/// Parses the JSON ensemble schema (see docs/formats.md).
Ensemble parse_ensemble(std::string_view json_text);
Ensemble load_ensemble(const std::filesystem::path& path);

}  // namespace sqsd
