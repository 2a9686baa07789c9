#include "sqsd/quantum.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>
#include <fmt/format.h>

#include "sqsd/error.hpp"

namespace sqsd {
namespace {

void require_square(const ComplexMatrix& m) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw Error(ErrorCode::NotSquare, fmt::format("matrix is {}x{}", m.rows(), m.cols()));
  }
}

bool all_finite(const ComplexMatrix& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (!std::isfinite(m(r, c).real()) || !std::isfinite(m(r, c).imag())) return false;
    }
  }
  return true;
}

double hermitian_residual(const ComplexMatrix& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

double min_eigenvalue(const ComplexMatrix& m) {
  // Symmetrize before the solver so it sees an exactly Hermitian input.
  ComplexMatrix h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

ComplexMatrix projector(const ComplexVector& v) { return v * v.adjoint(); }

ComplexVector equatorial(double angle) {
  ComplexVector v(2);
  v << Complex(std::sqrt(0.5), 0.0), std::sqrt(0.5) * std::polar(1.0, angle);
  return v;
}

}  // namespace

DensityOperator validate_density(const ComplexMatrix& m) {
  require_square(m);
  if (!all_finite(m)) throw Error(ErrorCode::NotHermitian, "non-finite entry");
  const double herm = hermitian_residual(m);
  if (herm > tol::kHermitian) {
    throw Error(ErrorCode::NotHermitian, fmt::format("max |m - m^H| = {:.3e}", herm), herm);
  }
  const double lambda_min = min_eigenvalue(m);
  if (lambda_min < -tol::kPsd) {
    throw Error(ErrorCode::NotPsd, fmt::format("smallest eigenvalue {:.3e}", lambda_min),
                lambda_min);
  }
  const double tr = m.trace().real();
  if (std::abs(tr - 1.0) > tol::kTrace) {
    throw Error(ErrorCode::BadTrace, fmt::format("trace {}", tr), tr);
  }
  return DensityOperator(m);
}

Povm validate_povm(std::vector<ComplexMatrix> effects) {
  if (effects.empty()) throw Error(ErrorCode::DimMismatch, "POVM has no effects");
  const auto dim = effects.front().rows();
  ComplexMatrix sum = ComplexMatrix::Zero(dim, dim);
  for (std::size_t o = 0; o < effects.size(); ++o) {
    const auto& e = effects[o];
    require_square(e);
    if (e.rows() != dim) {
      throw Error(ErrorCode::DimMismatch,
                  fmt::format("effect {} has dim {}, expected {}", o, e.rows(), dim));
    }
    const double herm = all_finite(e) ? hermitian_residual(e) : INFINITY;
    if (herm > tol::kHermitian) {
      throw Error(ErrorCode::EffectNotPsd, fmt::format("effect {} is not Hermitian", o), herm);
    }
    const double lambda_min = min_eigenvalue(e);
    if (lambda_min < -tol::kPsd) {
      throw Error(ErrorCode::EffectNotPsd,
                  fmt::format("effect {} has eigenvalue {:.3e}", o, lambda_min), lambda_min);
    }
    sum += e;
  }
  const double defect = (sum - ComplexMatrix::Identity(dim, dim)).norm();
  if (defect > tol::kCompleteness) {
    throw Error(ErrorCode::IncompleteSum,
                fmt::format("||sum_o E_o - I||_F = {:.3e}", defect), defect);
  }
  return Povm(std::move(effects));
}

double born_prob(const ComplexMatrix& effect, const DensityOperator& rho) {
  if (effect.rows() != rho.dim() || effect.cols() != rho.dim()) {
    throw Error(ErrorCode::DimMismatch,
                fmt::format("effect dim {} vs state dim {}", effect.rows(), rho.dim()));
  }
  const double p = (effect * rho.matrix()).trace().real();
  if (p < -tol::kPsd || p > 1.0 + tol::kPsd) {
    throw Error(ErrorCode::OutOfRange, fmt::format("Born probability {} outside [0,1]", p), p);
  }
  return std::clamp(p, 0.0, 1.0);
}

Povm unitary_conjugated_povm(const ComplexMatrix& u, const Povm& base) {
  require_square(u);
  if (u.rows() != base.dim()) {
    throw Error(ErrorCode::DimMismatch,
                fmt::format("unitary dim {} vs POVM dim {}", u.rows(), base.dim()));
  }
  const auto id = ComplexMatrix::Identity(u.rows(), u.cols());
  const double defect = (u.adjoint() * u - id).cwiseAbs().maxCoeff();
  if (defect > tol::kUnitary) {
    throw Error(ErrorCode::NotUnitary, fmt::format("max |U^H U - I| = {:.3e}", defect), defect);
  }
  std::vector<ComplexMatrix> effects;
  effects.reserve(base.outcome_count());
  for (const auto& f : base.effects()) {
    ComplexMatrix e = u.adjoint() * f * u;
    // Remove the anti-Hermitian rounding residue of the triple product.
    effects.push_back(0.5 * (e + e.adjoint()));
  }
  return validate_povm(std::move(effects));
}

DensityOperator pure_state(const ComplexVector& psi) {
  return validate_density(projector(psi / psi.norm()));
}

Povm binary_projective_povm(double phi) {
  const double c = std::cos(phi);
  const double s = std::sin(phi);
  ComplexVector e0(2), e1(2);
  e0 << c, s;
  e1 << -s, c;
  return validate_povm({projector(e0), projector(e1)});
}

std::vector<DensityOperator> binary_states(double theta) {
  ComplexVector psi1(2), psi2(2);
  psi1 << 1.0, 0.0;
  psi2 << std::cos(theta), std::sin(theta);
  return {pure_state(psi1), pure_state(psi2)};
}

double trine_phase(std::size_t k) {
  return 2.0 * std::numbers::pi * static_cast<double>(k) / 3.0;
}

std::vector<DensityOperator> trine_states() {
  std::vector<DensityOperator> states;
  for (std::size_t i = 0; i < 3; ++i) states.push_back(pure_state(equatorial(trine_phase(i))));
  return states;
}

Povm trine_povm(double alpha) {
  const double period = family_period(MeasurementFamily::Trine);
  if (!(alpha >= 0.0 && alpha < period)) {
    throw Error(ErrorCode::OutOfRange, fmt::format("trine orientation {} not in [0, 2pi/3)", alpha),
                alpha);
  }
  std::vector<ComplexMatrix> effects;
  for (std::size_t o = 0; o < 3; ++o) {
    effects.push_back((2.0 / 3.0) * projector(equatorial(alpha + trine_phase(o))));
  }
  return validate_povm(std::move(effects));
}

double trine_likelihood(std::size_t hypothesis, double alpha, std::size_t outcome) {
  const std::size_t k = (hypothesis % 3 + 3 - outcome % 3) % 3;
  return (1.0 + std::cos(trine_phase(k) - alpha)) / 3.0;
}

std::string to_string(MeasurementFamily family) {
  switch (family) {
    case MeasurementFamily::Binary: return "binary";
    case MeasurementFamily::Trine: return "trine";
    case MeasurementFamily::Explicit: return "explicit";
  }
  return "explicit";
}

std::optional<MeasurementFamily> parse_family(std::string_view name) {
  if (name == "binary") return MeasurementFamily::Binary;
  if (name == "trine") return MeasurementFamily::Trine;
  if (name == "explicit") return MeasurementFamily::Explicit;
  return std::nullopt;
}

double family_period(MeasurementFamily family) {
  switch (family) {
    case MeasurementFamily::Binary: return std::numbers::pi;
    case MeasurementFamily::Trine: return 2.0 * std::numbers::pi / 3.0;
    case MeasurementFamily::Explicit: return 2.0 * std::numbers::pi;
  }
  return 2.0 * std::numbers::pi;
}

std::optional<Povm> family_povm(MeasurementFamily family, double param) {
  switch (family) {
    case MeasurementFamily::Binary: return binary_projective_povm(param);
    case MeasurementFamily::Trine: {
      const double period = family_period(family);
      double wrapped = std::fmod(param, period);
      if (wrapped < 0.0) wrapped += period;
      if (wrapped >= period) wrapped = 0.0;
      return trine_povm(wrapped);
    }
    case MeasurementFamily::Explicit: return std::nullopt;
  }
  return std::nullopt;
}

MeasurementLibrary::MeasurementLibrary(std::vector<Povm> povms,
                                       std::optional<std::vector<double>> params,
                                       MeasurementFamily family, double period)
    : povms_(std::move(povms)), params_(std::move(params)), family_(family), period_(period) {
  if (povms_.empty()) throw Error(ErrorCode::EmptyLibrary, "measurement library is empty");
  for (std::size_t a = 1; a < povms_.size(); ++a) {
    if (povms_[a].dim() != povms_[0].dim() ||
        povms_[a].outcome_count() != povms_[0].outcome_count()) {
      throw Error(ErrorCode::DimMismatch,
                  fmt::format("POVM {} differs in dimension or outcome count", a));
    }
  }
  if (params_) {
    if (params_->size() != povms_.size()) {
      throw Error(ErrorCode::MissingParams, "parameter count does not match POVM count");
    }
    for (std::size_t a = 0; a < params_->size(); ++a) {
      const double p = (*params_)[a];
      if (!(p >= 0.0 && p < period_) || (a > 0 && !(p > (*params_)[a - 1]))) {
        throw Error(ErrorCode::OutOfRange,
                    "library parameters must be strictly increasing within one period");
      }
    }
  }
}

std::vector<double> uniform_parameters(std::size_t count, double period) {
  std::vector<double> params(count);
  for (std::size_t k = 0; k < count; ++k) {
    params[k] = period * static_cast<double>(k) / static_cast<double>(count);
  }
  return params;
}

MeasurementLibrary family_library(MeasurementFamily family, std::vector<double> params,
                                  std::optional<double> extra) {
  const double period = family_period(family);
  if (extra) {
    double wrapped = std::fmod(*extra, period);
    if (wrapped < 0.0) wrapped += period;
    if (wrapped >= period) wrapped = 0.0;
    const auto it = std::lower_bound(params.begin(), params.end(), wrapped);
    if (it == params.end() || *it != wrapped) params.insert(it, wrapped);
  }
  std::vector<Povm> povms;
  povms.reserve(params.size());
  for (double p : params) {
    auto povm = family_povm(family, p);
    if (!povm) throw Error(ErrorCode::MissingParams, "explicit family has no generator");
    povms.push_back(std::move(*povm));
  }
  return MeasurementLibrary(std::move(povms), std::move(params), family, period);
}

LikelihoodTable::LikelihoodTable(std::size_t hypotheses, std::size_t actions,
                                 std::size_t outcomes, std::vector<double> values)
    : hypotheses_(hypotheses), actions_(actions), outcomes_(outcomes), values_(std::move(values)) {
  if (values_.size() != hypotheses_ * actions_ * outcomes_) {
    throw Error(ErrorCode::DimMismatch, "likelihood table size mismatch");
  }
  for (std::size_t i = 0; i < hypotheses_; ++i) {
    for (std::size_t a = 0; a < actions_; ++a) {
      double sum = 0.0;
      for (double v : row(i, a)) {
        if (!(v >= 0.0 && v <= 1.0)) {
          throw Error(ErrorCode::OutOfRange, fmt::format("likelihood {} outside [0,1]", v), v);
        }
        sum += v;
      }
      if (std::abs(sum - 1.0) > tol::kCompleteness) {
        throw Error(ErrorCode::IncompleteSum,
                    fmt::format("likelihood row (i={}, a={}) sums to {}", i, a, sum), sum - 1.0);
      }
    }
  }
}

LikelihoodTable build_likelihood_table(std::span<const DensityOperator> states,
                                       const MeasurementLibrary& library) {
  const std::size_t outcomes = library.outcome_count();
  std::vector<double> values;
  values.reserve(states.size() * library.size() * outcomes);
  for (const auto& rho : states) {
    if (rho.dim() != library.dim()) {
      throw Error(ErrorCode::DimMismatch,
                  fmt::format("state dim {} vs library dim {}", rho.dim(), library.dim()));
    }
    for (const auto& povm : library.povms()) {
      for (const auto& e : povm.effects()) values.push_back(born_prob(e, rho));
    }
  }
  return LikelihoodTable(states.size(), library.size(), outcomes, std::move(values));
}

}  // namespace sqsd
