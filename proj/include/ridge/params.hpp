#pragma once

#include <cmath>
#include <string>

#include "ridge/error.hpp"

namespace ridge {

// Size-condition constant b of the lower-bound theorem (rescaled form A <= b alpha^{2/3}).
inline constexpr double kSizeConstantB = 0.13;

// Physical inputs of the half-strip problem together with the derived
// dimensionless thickness and boundary amplitude.
struct ProblemParams {
  double sigma = 0.0;    // sheet thickness
  double L = 0.0;        // half width of the strip
  double alpha = 0.0;    // bending half angle (radians)
  double a = 0.0;        // physical amplitude of the y = 0 Dirichlet data
  double epsilon = 0.0;  // sigma / L
  double A = 0.0;        // a * sigma^{-1/3} * L^{-2/3}

  // Length scale of the rescaled y coordinate and of v, w: sigma^{1/3} L^{2/3}.
  double y_scale() const { return std::cbrt(sigma) * std::cbrt(L * L); }
  // Length scale of the rescaled u displacement: sigma^{2/3} L^{1/3}.
  double u_scale() const { return std::cbrt(sigma * sigma) * std::cbrt(L); }
  // Energy scale sigma^{5/3} L^{1/3}.
  double energy_scale() const { return std::pow(sigma, 5.0 / 3.0) * std::cbrt(L); }
};

inline ProblemParams rescale_params(double sigma, double L, double alpha, double a) {
  detail::require_domain(sigma > 0.0 && std::isfinite(sigma), "sigma must be positive");
  detail::require_domain(L > 0.0 && std::isfinite(L), "L must be positive");
  detail::require_domain(alpha > 0.0 && std::isfinite(alpha), "alpha must be positive");
  detail::require_domain(a >= 0.0 && std::isfinite(a), "a must be non-negative");
  ProblemParams p{sigma, L, alpha, a, 0.0, 0.0};
  p.epsilon = sigma / L;
  p.A = a / p.y_scale();
  return p;
}

// Inverse map: recover (sigma, a) from (epsilon, A) for a given L.
inline ProblemParams params_from_dimensionless(double epsilon, double A, double alpha, double L = 1.0) {
  detail::require_domain(epsilon > 0.0, "epsilon must be positive");
  detail::require_domain(A >= 0.0, "A must be non-negative");
  detail::require_domain(alpha >= 0.0, "alpha must be non-negative");
  const double sigma = epsilon * L;
  ProblemParams p{sigma, L, alpha, 0.0, epsilon, A};
  p.a = A * p.y_scale();
  return p;
}

// Physical energy sigma^{5/3} L^{1/3} I from the rescaled energy I.
inline double unscale_energy(double I_value, const ProblemParams& p) {
  detail::require_domain(I_value >= 0.0, "rescaled energy must be non-negative");
  return p.energy_scale() * I_value;
}

inline double rescale_energy(double physical, const ProblemParams& p) {
  detail::require_domain(physical >= 0.0, "physical energy must be non-negative");
  return physical / p.energy_scale();
}

// Largest admissible rescaled amplitude b alpha^{2/3}.
inline double size_bound_rescaled(double alpha, double b = kSizeConstantB) {
  return b * std::pow(alpha, 2.0 / 3.0);
}

// Physical form b sigma^{1/3} L^{2/3} alpha^{2/3}.
inline double size_bound_physical(const ProblemParams& p, double b = kSizeConstantB) {
  return b * p.y_scale() * std::pow(p.alpha, 2.0 / 3.0);
}

inline bool size_condition_holds(double A, double alpha, double b = kSizeConstantB) {
  return A <= size_bound_rescaled(alpha, b);
}

}  // namespace ridge
