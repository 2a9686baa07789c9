#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "sqsd/belief.hpp"
#include "sqsd/counters.hpp"
#include "sqsd/quantum.hpp"

namespace sqsd {

/// Either declare hypothesis `index` (Stop) or perform library measurement `index`.
/// Indices are zero-based.
struct Action {
  enum class Kind : std::uint8_t { Stop, Measure };

  Kind kind = Kind::Stop;
  std::uint32_t index = 0;

  static Action stop(std::size_t hypothesis) {
    return {Kind::Stop, static_cast<std::uint32_t>(hypothesis)};
  }
  static Action measure(std::size_t action) {
    return {Kind::Measure, static_cast<std::uint32_t>(action)};
  }
  bool is_stop() const noexcept { return kind == Kind::Stop; }

  friend bool operator==(const Action&, const Action&) = default;
};

/// Raw recomputes Proj_B(tau(b,a,o)) at every stage as the analyzed algorithm
/// does; Memoized computes each target once and reuses it across stages.
enum class ProjectionMode { Raw, Memoized };

struct PlannerConfig {
  PlannerConfig(std::size_t horizon, double measurement_cost,
                std::shared_ptr<const BeliefGrid> grid,
                std::shared_ptr<const MeasurementLibrary> library,
                std::shared_ptr<const LikelihoodTable> table, Belief prior);

  std::size_t horizon;
  double measurement_cost;
  std::shared_ptr<const BeliefGrid> grid;
  std::shared_ptr<const MeasurementLibrary> library;
  std::shared_ptr<const LikelihoodTable> table;
  Belief prior;
  ProjectionMode mode = ProjectionMode::Memoized;
  unsigned threads = 1;

  std::size_t hypotheses() const noexcept { return table->hypotheses(); }
  std::size_t outcomes() const noexcept { return table->outcomes(); }
  std::size_t actions() const noexcept { return table->actions(); }
};

/// Stage-major table over grid point ids, stages 0..H.
template <typename T>
class StageTable {
 public:
  StageTable() = default;
  StageTable(std::size_t stages, std::size_t points, T fill = T{})
      : stages_(stages), points_(points), data_(stages * points, fill) {}

  std::size_t stages() const noexcept { return stages_; }
  std::size_t points() const noexcept { return points_; }
  T& operator()(std::size_t t, std::size_t id) noexcept { return data_[t * points_ + id]; }
  const T& operator()(std::size_t t, std::size_t id) const noexcept {
    return data_[t * points_ + id];
  }
  std::span<const T> row(std::size_t t) const noexcept {
    return {data_.data() + t * points_, points_};
  }
  std::span<T> row(std::size_t t) noexcept { return {data_.data() + t * points_, points_}; }
  const std::vector<T>& data() const noexcept { return data_; }

  friend bool operator==(const StageTable&, const StageTable&) = default;

 private:
  std::size_t stages_ = 0;
  std::size_t points_ = 0;
  std::vector<T> data_;
};

using ValueTable = StageTable<double>;
using PolicyTable = StageTable<Action>;

struct PlanTables {
  ValueTable values;
  PolicyTable policy;
};

/// J_1(b, a) in the simplified form sum_o max_i b(i) l_i(a, o).
double one_step_value(std::span<const double> b, std::size_t action, const LikelihoodTable& table);

/// J_1(b, a) routed through posteriors: sum_o Pr(o|b,a) max_i tau(b,a,o)(i).
double one_step_value_routed(std::span<const double> b, std::size_t action,
                             const LikelihoodTable& table);

struct OneStepOptimum {
  double value = 0.0;
  std::size_t action = 0;
  std::optional<double> orientation;  // library parameter of `action`, when tagged
};

/// sup over the library of J_1(b, a); ties go to the smallest action id.
OneStepOptimum one_step_opt(std::span<const double> b, const LikelihoodTable& table,
                            const MeasurementLibrary& library);

/// G(b) = J_1*(b) - StopVal(b).
double gain(std::span<const double> b, const LikelihoodTable& table,
            const MeasurementLibrary& library);

/// Projected backward induction over the grid and library.
PlanTables plan(const PlannerConfig& cfg, CostCounters& counters);

/// V_t(Proj_B(b)).
double value_at(std::span<const double> b, std::size_t t, const ValueTable& values,
                const BeliefGrid& grid);

/// Reference recursion for M = 2 on the fine 1-D lattice {(i/N, 1 - i/N)},
/// with nearest-point projection by direct rounding instead of a grid scan.
ValueTable exact_1d_oracle(const LikelihoodTable& table, std::size_t horizon,
                           double measurement_cost, int resolution,
                           std::size_t cap = 50'000'000);

}  // namespace sqsd
