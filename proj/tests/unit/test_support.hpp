#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "sqsd/belief.hpp"
#include "sqsd/quantum.hpp"

namespace sqsd::testing {

inline constexpr double kPi = std::numbers::pi;

/// Haar-ish random unitary from the QR factorization of a complex Gaussian matrix.
inline ComplexMatrix random_unitary(int dim, std::mt19937_64& gen) {
  std::normal_distribution<double> n(0.0, 1.0);
  ComplexMatrix z(dim, dim);
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c) z(r, c) = Complex(n(gen), n(gen));
  Eigen::HouseholderQR<ComplexMatrix> qr(z);
  ComplexMatrix q = qr.householderQ();
  return q;
}

inline ComplexMatrix random_density_matrix(int dim, std::mt19937_64& gen) {
  std::normal_distribution<double> n(0.0, 1.0);
  ComplexMatrix a(dim, dim);
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c) a(r, c) = Complex(n(gen), n(gen));
  ComplexMatrix rho = a * a.adjoint();
  rho /= rho.trace().real();
  return 0.5 * (rho + rho.adjoint());
}

/// Row-stochastic likelihood table l_i(a, .) with random entries.
inline LikelihoodTable random_table(std::size_t m, std::size_t actions, std::size_t outcomes,
                                    std::mt19937_64& gen) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> v(m * actions * outcomes);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t a = 0; a < actions; ++a) {
      double s = 0.0;
      for (std::size_t o = 0; o < outcomes; ++o) {
        v[(i * actions + a) * outcomes + o] = u(gen);
        s += v[(i * actions + a) * outcomes + o];
      }
      for (std::size_t o = 0; o < outcomes; ++o) v[(i * actions + a) * outcomes + o] /= s;
    }
  }
  return LikelihoodTable(m, actions, outcomes, std::move(v));
}

inline std::vector<double> random_simplex_point(std::size_t m, std::mt19937_64& gen) {
  std::exponential_distribution<double> e(1.0);
  std::vector<double> w(m);
  double s = 0.0;
  for (auto& x : w) {
    x = e(gen);
    s += x;
  }
  for (auto& x : w) x /= s;
  return w;
}

/// Brute-force nearest grid point: collect every candidate within 1e-9 lattice
/// units of the minimum distance, then pick the lexicographically smallest after
/// rotating coordinates into the frame where N b is lexicographically smallest.
inline std::size_t oracle_project(std::span<const double> b, const BeliefGrid& grid) {
  const std::size_t m = b.size();
  const double n = grid.resolution();
  auto dist = [&](std::size_t id) {
    double d = 0.0;
    for (std::size_t i = 0; i < m; ++i) d = std::max(d, std::abs(n * b[i] - grid.coords(id)[i]));
    return d;
  };
  double dmin = 1e300;
  for (std::size_t id = 0; id < grid.size(); ++id) dmin = std::min(dmin, dist(id));

  auto rotated = [&](auto get, std::size_t r) {
    std::vector<double> v(m);
    for (std::size_t i = 0; i < m; ++i) v[i] = get((i + r) % m);
    return v;
  };
  auto less_tol = [](const std::vector<double>& x, const std::vector<double>& y) {
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (std::abs(x[i] - y[i]) <= 1e-9) continue;
      return x[i] < y[i];
    }
    return false;
  };
  std::size_t frame = 0;
  auto scaled = [&](std::size_t i) { return n * b[i]; };
  for (std::size_t r = 1; r < m; ++r)
    if (less_tol(rotated(scaled, r), rotated(scaled, frame))) frame = r;

  std::size_t best = grid.size();
  std::vector<double> best_key;
  for (std::size_t id = 0; id < grid.size(); ++id) {
    if (dist(id) > dmin + 1e-9) continue;
    const auto key = rotated([&](std::size_t i) { return double(grid.coords(id)[i]); }, frame);
    if (best == grid.size() || key < best_key) {
      best = id;
      best_key = key;
    }
  }
  return best;
}

}  // namespace sqsd::testing
