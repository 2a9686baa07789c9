#include <doctest.h>

#include <cmath>
#include <random>

#include "sqsd/error.hpp"
#include "sqsd/quantum.hpp"
#include "test_support.hpp"

using namespace sqsd;
using sqsd::testing::kPi;

namespace {

ComplexMatrix ket_bra(int i, int j) {
  ComplexMatrix m = ComplexMatrix::Zero(2, 2);
  m(i, j) = 1.0;
  return m;
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected sqsd::Error");
  return ErrorCode::InvalidConfig;
}

}  // namespace

TEST_CASE("validate_density accepts mixed and pure states") {
  const ComplexMatrix half_id = 0.5 * ComplexMatrix::Identity(2, 2);
  const auto rho = validate_density(half_id);
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(rho.matrix());
  CHECK(es.eigenvalues()(0) == doctest::Approx(0.5));
  CHECK(es.eigenvalues()(1) == doctest::Approx(0.5));
  CHECK_NOTHROW(validate_density(ket_bra(0, 0)));
}

TEST_CASE("validate_density names the violated invariant") {
  ComplexMatrix bad_trace = ComplexMatrix::Zero(2, 2);
  bad_trace(0, 0) = 0.6;
  bad_trace(1, 1) = 0.6;
  try {
    validate_density(bad_trace);
    FAIL("expected BadTrace");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::BadTrace);
    CHECK(e.residual() == doctest::Approx(1.2));
  }

  ComplexMatrix skew = 0.5 * ComplexMatrix::Identity(2, 2);
  skew(0, 1) = 0.1;
  CHECK(code_of([&] { validate_density(skew); }) == ErrorCode::NotHermitian);

  ComplexMatrix negative = ComplexMatrix::Zero(2, 2);
  negative(0, 0) = 1.5;
  negative(1, 1) = -0.5;
  CHECK(code_of([&] { validate_density(negative); }) == ErrorCode::NotPsd);

  CHECK(code_of([&] { validate_density(ComplexMatrix::Zero(2, 3)); }) == ErrorCode::NotSquare);
}

TEST_CASE("validate_povm") {
  CHECK_NOTHROW(validate_povm({ket_bra(0, 0), ket_bra(1, 1)}));
  const auto single = validate_povm({ComplexMatrix::Identity(2, 2)});
  CHECK(single.outcome_count() == 1);

  try {
    validate_povm({0.9 * ket_bra(0, 0), ket_bra(1, 1)});
    FAIL("expected IncompleteSum");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::IncompleteSum);
    CHECK(e.residual() == doctest::Approx(0.1));
  }

  ComplexMatrix neg = ComplexMatrix::Zero(2, 2);
  neg(0, 0) = -0.2;
  ComplexMatrix comp = ComplexMatrix::Identity(2, 2) - neg;
  CHECK(code_of([&] { validate_povm({neg, comp}); }) == ErrorCode::EffectNotPsd);
  CHECK(code_of([&] { validate_povm({ket_bra(0, 0), ComplexMatrix::Identity(3, 3)}); }) ==
        ErrorCode::DimMismatch);
}

TEST_CASE("born_prob") {
  const auto zero = validate_density(ket_bra(0, 0));
  CHECK(born_prob(ket_bra(0, 0), zero) == 1.0);
  CHECK(born_prob(ket_bra(1, 1), zero) == 0.0);
  for (double phi : {0.1, 0.7, 1.3, 2.9}) {
    const auto e = binary_projective_povm(phi);
    CHECK(born_prob(e.effect(0), zero) == doctest::Approx(std::cos(phi) * std::cos(phi)).epsilon(1e-14));
  }
  CHECK(code_of([&] { born_prob(ComplexMatrix::Identity(3, 3), zero); }) == ErrorCode::DimMismatch);
}

TEST_CASE("unitary_conjugated_povm") {
  const auto computational = validate_povm({ket_bra(0, 0), ket_bra(1, 1)});

  const auto same = unitary_conjugated_povm(ComplexMatrix::Identity(2, 2), computational);
  CHECK((same.effect(0) - ket_bra(0, 0)).norm() == 0.0);
  CHECK((same.effect(1) - ket_bra(1, 1)).norm() == 0.0);

  ComplexMatrix x(2, 2);
  x << 0, 1, 1, 0;
  const auto swapped = unitary_conjugated_povm(x, computational);
  CHECK((swapped.effect(0) - ket_bra(1, 1)).norm() < 1e-15);
  CHECK((swapped.effect(1) - ket_bra(0, 0)).norm() < 1e-15);

  // U = [[c, s], [-s, c]] maps |e_o(phi)> to |o>, so U^H |o><o| U = |e_o><e_o|.
  for (double phi : {0.0, 0.3, 1.1, 2.5}) {
    ComplexMatrix u(2, 2);
    u << std::cos(phi), std::sin(phi), -std::sin(phi), std::cos(phi);
    const auto rotated = unitary_conjugated_povm(u, computational);
    const auto direct = binary_projective_povm(phi);
    for (std::size_t o = 0; o < 2; ++o) {
      // Independent oracle: explicit 2x2 outer product of e_o.
      const double c = std::cos(phi), s = std::sin(phi);
      const double e[2][2] = {{c, s}, {-s, c}};
      for (int r = 0; r < 2; ++r)
        for (int k = 0; k < 2; ++k) {
          CHECK(std::abs(rotated.effect(o)(r, k) - e[o][r] * e[o][k]) < 1e-14);
          CHECK(std::abs(direct.effect(o)(r, k) - e[o][r] * e[o][k]) < 1e-14);
        }
    }
  }

  ComplexMatrix not_unitary = 1.1 * ComplexMatrix::Identity(2, 2);
  CHECK(code_of([&] { unitary_conjugated_povm(not_unitary, computational); }) == ErrorCode::NotUnitary);
}

TEST_CASE("conjugation by random unitaries preserves POVM validity") {
  std::mt19937_64 gen(11);
  for (int trial = 0; trial < 200; ++trial) {
    const int dim = 2 + trial % 3;
    // Random projective POVM in a random basis, then conjugate again.
    const auto basis = sqsd::testing::random_unitary(dim, gen);
    std::vector<ComplexMatrix> effects;
    for (int k = 0; k < dim; ++k) effects.push_back(basis.col(k) * basis.col(k).adjoint());
    const auto base = validate_povm(std::move(effects));
    const auto u = sqsd::testing::random_unitary(dim, gen);
    const auto conj = unitary_conjugated_povm(u, base);
    CHECK(conj.outcome_count() == base.outcome_count());

    const auto rho = validate_density(sqsd::testing::random_density_matrix(dim, gen));
    double total = 0.0;
    for (const auto& e : conj.effects()) total += born_prob(e, rho);
    CHECK(std::abs(total - 1.0) <= tol::kCompleteness);
  }
}

TEST_CASE("binary_projective_povm") {
  const auto p0 = binary_projective_povm(0.0);
  CHECK((p0.effect(0) - ket_bra(0, 0)).norm() < 1e-16);
  CHECK((p0.effect(1) - ket_bra(1, 1)).norm() < 1e-16);
  const auto p90 = binary_projective_povm(kPi / 2);
  CHECK((p90.effect(0) - ket_bra(1, 1)).norm() < 1e-15);
  CHECK((p90.effect(1) - ket_bra(0, 0)).norm() < 1e-15);
  const auto zero = validate_density(ket_bra(0, 0));
  const auto p45 = binary_projective_povm(kPi / 4);
  CHECK(born_prob(p45.effect(0), zero) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(born_prob(p45.effect(1), zero) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("trine_povm reproduces the closed-form likelihood") {
  const auto states = trine_states();
  const auto at0 = trine_povm(0.0);
  CHECK(born_prob(at0.effect(0), states[0]) == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  CHECK(born_prob(at0.effect(0), states[1]) == doctest::Approx(1.0 / 6.0).epsilon(1e-14));

  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> alpha_dist(0.0, 2.0 * kPi / 3.0);
  for (int trial = 0; trial < 100; ++trial) {
    const double alpha = alpha_dist(gen);
    const auto povm = trine_povm(alpha);
    for (std::size_t i = 0; i < 3; ++i) {
      double row = 0.0;
      for (std::size_t o = 0; o < 3; ++o) {
        const double l = born_prob(povm.effect(o), states[i]);
        // Oracle: (1/3)(1 + cos(phase_i - alpha - phase_o)) written out directly.
        const double oracle = (1.0 + std::cos(2.0 * kPi * (double(i) - double(o)) / 3.0 - alpha)) / 3.0;
        CHECK(std::abs(l - oracle) <= 1e-12);
        CHECK(std::abs(l - trine_likelihood(i, alpha, o)) <= 1e-12);
        row += l;
      }
      CHECK(std::abs(row - 1.0) <= 1e-12);
    }
  }
  CHECK(code_of([] { trine_povm(2.0 * kPi / 3.0); }) == ErrorCode::OutOfRange);
  CHECK(code_of([] { trine_povm(-0.1); }) == ErrorCode::OutOfRange);
}

TEST_CASE("build_likelihood_table") {
  const double theta = kPi / 3;
  const auto lib = family_library(MeasurementFamily::Binary, {0.0, kPi / 4});
  const auto states = binary_states(theta);
  const auto table = build_likelihood_table(states, lib);
  CHECK(table(0, 0, 0) == doctest::Approx(1.0));
  CHECK(table(1, 0, 0) == doctest::Approx(0.25).epsilon(1e-14));

  // Entrywise agreement with born_prob is exact.
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t a = 0; a < lib.size(); ++a)
      for (std::size_t o = 0; o < 2; ++o) CHECK(table(i, a, o) == born_prob(lib.povm(a).effect(o), states[i]));

  const auto trine = family_library(MeasurementFamily::Trine, uniform_parameters(3, 2.0 * kPi / 3.0));
  const auto tstates = trine_states();
  const auto ttable = build_likelihood_table(tstates, trine);
  CHECK(ttable.hypotheses() == 3);
  CHECK(ttable.actions() == 3);
  CHECK(ttable.outcomes() == 3);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t a = 0; a < 3; ++a) {
      double s = 0.0;
      for (double v : ttable.row(i, a)) s += v;
      CHECK(std::abs(s - 1.0) <= 1e-12);
    }

  const MeasurementLibrary trivial({validate_povm({ComplexMatrix::Identity(2, 2)})}, std::nullopt,
                                   MeasurementFamily::Explicit, 2 * kPi);
  const auto single = build_likelihood_table(states, trivial);
  CHECK(single(0, 0, 0) == 1.0);
  CHECK(single(1, 0, 0) == doctest::Approx(1.0).epsilon(1e-15));

  const std::vector<DensityOperator> qutrit{validate_density(ComplexMatrix::Identity(3, 3) / 3.0)};
  CHECK(code_of([&] { build_likelihood_table(qutrit, lib); }) == ErrorCode::DimMismatch);
  CHECK(code_of([] { LikelihoodTable(1, 1, 2, {0.5, 0.6}); }) == ErrorCode::IncompleteSum);
  CHECK(code_of([] { LikelihoodTable(1, 1, 2, {1.5, -0.5}); }) == ErrorCode::OutOfRange);
}

TEST_CASE("measurement library invariants") {
  std::vector<Povm> two{binary_projective_povm(0.0), binary_projective_povm(0.5)};
  CHECK(code_of([&] {
          MeasurementLibrary(two, std::vector<double>{0.5, 0.0}, MeasurementFamily::Binary, kPi);
        }) == ErrorCode::OutOfRange);
  CHECK(code_of([&] {
          MeasurementLibrary({binary_projective_povm(0.0), trine_povm(0.0)}, std::nullopt,
                             MeasurementFamily::Explicit, kPi);
        }) == ErrorCode::DimMismatch);
  CHECK(code_of([] { MeasurementLibrary({}, std::nullopt, MeasurementFamily::Explicit, kPi); }) ==
        ErrorCode::EmptyLibrary);

  const auto lib = family_library(MeasurementFamily::Binary, uniform_parameters(4, kPi), 0.3);
  REQUIRE(lib.params());
  CHECK(lib.size() == 5);
  CHECK((*lib.params())[1] == 0.3);
  // Inserting an existing parameter is a no-op.
  CHECK(family_library(MeasurementFamily::Binary, uniform_parameters(4, kPi), 0.0).size() == 4);
}
