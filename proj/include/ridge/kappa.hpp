#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>

#include <boost/math/quadrature/gauss.hpp>

#include "ridge/error.hpp"

namespace ridge {

// Largest value of z^2 (1 - z) on [0, 1], attained at z = 2/3.
inline constexpr double kCubicPeak = 4.0 / 27.0;

// Roots z1 < 2/3 < z2 of z^2 (1 - z) = mu in [0, 1], for 0 < mu < 4/27.
// Trigonometric form of the cubic, then two Newton steps.
inline std::array<double, 2> cut_roots(double mu) {
  detail::require_domain(mu > 0.0 && mu < kCubicPeak, "cut roots need 0 < mu < 4/27");
  const double theta = std::acos(std::clamp(1.0 - 13.5 * mu, -1.0, 1.0)) / 3.0;
  auto root = [&](double shift) { return 1.0 / 3.0 + (2.0 / 3.0) * std::cos(theta - shift); };
  const double two_pi_3 = 2.0 * std::numbers::pi / 3.0;
  std::array<double, 2> z = {root(two_pi_3), root(0.0)};
  for (double& x : z) {
    for (int k = 0; k < 2; ++k) {
      const double f = x * x * (1.0 - x) - mu;
      const double d = 2.0 * x - 3.0 * x * x;
      if (d != 0.0) x -= f / d;
    }
  }
  return z;
}

// K(mu) = int_0^1 [max(z^2 (1 - z) - mu, 0)]^2 dz.
//
// The positive part lives on [z1, z2]; there the integrand is a degree-6
// polynomial, so a 5-point Gauss-Legendre rule is exact.
inline double kappa(double mu) {
  detail::require_domain(mu >= 0.0 && std::isfinite(mu), "mu must be non-negative");
  if (mu >= kCubicPeak) return 0.0;
  double lo = 0.0, hi = 1.0;
  if (mu > 0.0) {
    const auto z = cut_roots(mu);
    lo = z[0];
    hi = z[1];
  }
  auto f = [mu](double z) {
    const double c = z * z * (1.0 - z) - mu;
    return c * c;
  };
  return std::max(0.0, boost::math::quadrature::gauss<double, 5>::integrate(f, lo, hi));
}

// Appendix lower bound K(mu) >= 1/105 - mu/6.
inline double kappa_lower_bound(double mu) { return 1.0 / 105.0 - mu / 6.0; }

struct AppendixReport {
  double min_margin = std::numeric_limits<double>::infinity();
  double argmin_mu = 0.0;
  std::size_t samples = 0;
  bool pass = true;
};

inline AppendixReport appendix_check(std::span<const double> mu_samples, double tol = 1e-12) {
  AppendixReport r;
  for (double mu : mu_samples) {
    detail::require_domain(mu >= 0.0, "mu samples must be non-negative");
    const double m = kappa(mu) - kappa_lower_bound(mu);
    if (m < r.min_margin) {
      r.min_margin = m;
      r.argmin_mu = mu;
    }
    ++r.samples;
  }
  if (r.samples == 0) r.min_margin = 0.0;
  r.pass = r.min_margin >= -tol;
  return r;
}

}  // namespace ridge
