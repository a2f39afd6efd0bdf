#pragma once

#include <cmath>
#include <numbers>
#include <random>

#include "ridge/ridge.hpp"

namespace ridge::testing {

// W = (1 - X^2) e^{-Y}, U = V = 0, with the matching per-column slope
// W_Y(X, 0) = -(1 - X^2). Not admissible (no far-field zero, slope varies).
struct ExpFixture {
  FieldSet fields;
  BoundaryData boundary;
};

inline ExpFixture exp_fixture(std::size_t n_x, std::size_t n_y, double y_max) {
  GridSpec g(n_x, n_y, y_max);
  FieldSet f(g);
  f.fill(Component::W, [](double X, double Y) { return (1.0 - X * X) * std::exp(-Y); });
  BoundaryData b = zero_boundary(g, 0.0);
  for (std::size_t i = 0; i < n_x; ++i) {
    const double X = g.x(i);
    b.W0[i] = 1.0 - X * X;
    b.slope[i] = -(1.0 - X * X);
  }
  b.W0.front() = b.W0.back() = 0.0;
  return {std::move(f), std::move(b)};
}

// Random admissible field. W mixes a ramp alpha Y e^{-Y/l}(1 - X^2)^k that
// keeps Lemma 1 close to active, smooth modes, and nodal noise of relative
// size `roughness`. W0, V0 are random with max |.| = A.
inline std::pair<FieldSet, BoundaryData> random_admissible(const GridSpec& g, double alpha, double A,
                                                           std::mt19937_64& rng, double roughness = 0.1) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0), pos(0.0, 1.0);
  const std::size_t nx = g.n_x();
  BoundaryData b = zero_boundary(g, alpha);
  if (A > 0.0) {
    double mw = 0.0, mv = 0.0;
    const double fw = 1.0 + 3.0 * pos(rng), fv = 1.0 + 3.0 * pos(rng), pw = unit(rng), pv = unit(rng);
    for (std::size_t i = 1; i + 1 < nx; ++i) {
      const double X = g.x(i), env = 1.0 - X * X;
      b.W0[i] = env * std::cos(fw * X + pw) + 0.2 * roughness * unit(rng) * env;
      b.V0[i] = env * std::sin(fv * X + pv) + 0.2 * roughness * unit(rng) * env;
      mw = std::max(mw, std::abs(b.W0[i]));
      mv = std::max(mv, std::abs(b.V0[i]));
    }
    for (std::size_t i = 0; i < nx; ++i) {
      if (mw > 0.0) b.W0[i] *= A / mw;
      if (mv > 0.0) b.V0[i] *= A / mv;
    }
  }
  FieldSet f(g);
  const double ell = 0.3 + 3.0 * pos(rng);
  const double k = 0.5 + 2.0 * pos(rng);
  const double amp = alpha * (0.3 + pos(rng));
  const double m1 = 0.2 * unit(rng), m2 = 0.2 * unit(rng);
  const double ymax = g.y_max();
  const double scale = std::max(alpha, 1e-3);
  for (std::size_t j = 0; j < g.n_y(); ++j)
    for (std::size_t i = 0; i < nx; ++i) {
      const double X = g.x(i), Y = g.y(j);
      const double env = std::pow(std::max(0.0, 1.0 - X * X), k);
      const double far = 1.0 - Y / ymax;
      double w = amp * Y * std::exp(-Y / ell) * env * far;
      w += scale * (m1 * std::sin(std::numbers::pi * (X + 1.0)) + m2 * std::cos(0.5 * std::numbers::pi * X)) *
           std::exp(-Y) * far;
      w += scale * roughness * unit(rng);
      f.w(i, j) = w;
      f.u(i, j) = 0.5 * scale * unit(rng);
      f.v(i, j) = 0.5 * scale * unit(rng);
    }
  return {apply_boundary_conditions(std::move(f), b), std::move(b)};
}

}  // namespace ridge::testing
