#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace sqsd {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

namespace tol {
inline constexpr double kHermitian = 1e-10;
inline constexpr double kTrace = 1e-10;
inline constexpr double kCompleteness = 1e-10;
inline constexpr double kPsd = 1e-9;
inline constexpr double kUnitary = 1e-10;
}  // namespace tol

/// A validated density operator: Hermitian, positive semidefinite, unit trace.
/// Only constructible through validate_density().
class DensityOperator {
 public:
  const ComplexMatrix& matrix() const noexcept { return matrix_; }
  Eigen::Index dim() const noexcept { return matrix_.rows(); }

 private:
  explicit DensityOperator(ComplexMatrix m) : matrix_(std::move(m)) {}
  ComplexMatrix matrix_;
  friend DensityOperator validate_density(const ComplexMatrix& m);
};

/// A validated POVM. Effects are indexed by outcome.
class Povm {
 public:
  const std::vector<ComplexMatrix>& effects() const noexcept { return effects_; }
  const ComplexMatrix& effect(std::size_t o) const { return effects_.at(o); }
  std::size_t outcome_count() const noexcept { return effects_.size(); }
  Eigen::Index dim() const noexcept { return effects_.front().rows(); }

 private:
  explicit Povm(std::vector<ComplexMatrix> e) : effects_(std::move(e)) {}
  std::vector<ComplexMatrix> effects_;
  friend Povm validate_povm(std::vector<ComplexMatrix> effects);
};

DensityOperator validate_density(const ComplexMatrix& m);
Povm validate_povm(std::vector<ComplexMatrix> effects);

/// Tr(E rho), checked against [-eps_psd, 1 + eps_psd] and clamped into [0, 1].
double born_prob(const ComplexMatrix& effect, const DensityOperator& rho);

/// E_o = U^dagger F_o U.
Povm unitary_conjugated_povm(const ComplexMatrix& u, const Povm& base);

DensityOperator pure_state(const ComplexVector& psi);

/// Rank-1 projective qubit measurement onto
/// |e_0> = cos(phi)|0> + sin(phi)|1>,  |e_1> = -sin(phi)|0> + cos(phi)|1>.
Povm binary_projective_povm(double phi);

/// Binary ensemble: psi_1 = |0>, psi_2 = cos(theta)|0> + sin(theta)|1>.
std::vector<DensityOperator> binary_states(double theta);

/// Phase label of trine state / outcome k (k = 0, 1, 2): 2*pi*k/3.
double trine_phase(std::size_t k);

/// Equatorial qubit state (I + cos(phase) X + sin(phase) Y) / 2.
std::vector<DensityOperator> trine_states();

/// Three-outcome trine POVM, E_o = (2/3) |a_o><a_o| with |a_o> the equatorial
/// state at angle alpha + phase(o). Requires alpha in [0, 2*pi/3).
Povm trine_povm(double alpha);

/// Closed-form trine likelihood (1/3)(1 + cos(phase_i - alpha - phase_o)),
/// evaluated on the phase difference index (i - o) mod 3 so that entries related
/// by relabelling hypotheses and outcomes together are bitwise equal.
double trine_likelihood(std::size_t hypothesis, double alpha, std::size_t outcome);

enum class MeasurementFamily { Binary, Trine, Explicit };

std::string to_string(MeasurementFamily family);
std::optional<MeasurementFamily> parse_family(std::string_view name);

/// Parameter period of a family (pi for binary, 2*pi/3 for trine).
double family_period(MeasurementFamily family);

/// POVM of a parameterized family at parameter `param`; Explicit has no generator.
std::optional<Povm> family_povm(MeasurementFamily family, double param);

/// Finite measurement library, optionally tagged with parameters.
class MeasurementLibrary {
 public:
  MeasurementLibrary(std::vector<Povm> povms, std::optional<std::vector<double>> params,
                     MeasurementFamily family, double period);

  const std::vector<Povm>& povms() const noexcept { return povms_; }
  const Povm& povm(std::size_t a) const { return povms_.at(a); }
  std::size_t size() const noexcept { return povms_.size(); }
  std::size_t outcome_count() const noexcept { return povms_.front().outcome_count(); }
  Eigen::Index dim() const noexcept { return povms_.front().dim(); }
  const std::optional<std::vector<double>>& params() const noexcept { return params_; }
  MeasurementFamily family() const noexcept { return family_; }
  double period() const noexcept { return period_; }

 private:
  std::vector<Povm> povms_;
  std::optional<std::vector<double>> params_;
  MeasurementFamily family_;
  double period_;
};

/// `count` equally spaced parameters on [0, period).
std::vector<double> uniform_parameters(std::size_t count, double period);

/// Builds a family library from sorted parameters. `extra` is wrapped into the
/// period and inserted in order unless already present.
MeasurementLibrary family_library(MeasurementFamily family, std::vector<double> params,
                                  std::optional<double> extra = std::nullopt);

/// Per-(hypothesis, action, outcome) Born probabilities, stored contiguously
/// with the outcome index fastest.
class LikelihoodTable {
 public:
  LikelihoodTable(std::size_t hypotheses, std::size_t actions, std::size_t outcomes,
                  std::vector<double> values);

  std::size_t hypotheses() const noexcept { return hypotheses_; }
  std::size_t actions() const noexcept { return actions_; }
  std::size_t outcomes() const noexcept { return outcomes_; }

  double operator()(std::size_t i, std::size_t a, std::size_t o) const noexcept {
    return values_[(i * actions_ + a) * outcomes_ + o];
  }
  /// Row l_i(a, .) as a span over outcomes.
  std::span<const double> row(std::size_t i, std::size_t a) const noexcept {
    return {values_.data() + (i * actions_ + a) * outcomes_, outcomes_};
  }
  const std::vector<double>& values() const noexcept { return values_; }

 private:
  std::size_t hypotheses_;
  std::size_t actions_;
  std::size_t outcomes_;
  std::vector<double> values_;
};

LikelihoodTable build_likelihood_table(std::span<const DensityOperator> states,
                                       const MeasurementLibrary& library);

}  // namespace sqsd
