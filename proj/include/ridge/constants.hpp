#pragma once

// Constants of the lower-bound argument.
//
// Lemma 2 bounds E_s >= kappa K(mu) alpha^14 / E_b^5. Carrying the change of
// variables Y = z Y~ through (1/2) int tau^2 dY gives kappa = pi^4/1024; the
// published proof writes pi^4/512. Both conventions are exposed. The
// published one reproduces the quoted mu* and b, the corrected one gives the
// constants the argument actually supports.

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <utility>

#include <boost/math/tools/toms748_solve.hpp>

#include "ridge/error.hpp"
#include "ridge/kappa.hpp"

namespace ridge {

// E_s >= alpha^14 / (5 * 729 * E_b^5) under the Lemma 2 hypothesis.
inline constexpr double kLemma2Coefficient = 1.0 / 3645.0;
inline constexpr double kTheoremCoefficient = 0.4;

enum class Convention { published, corrected };

inline const char* to_string(Convention c) { return c == Convention::published ? "published" : "corrected"; }

// Lower bound (2/5) alpha^{7/3} on the rescaled energy.
inline double theorem_bound(double alpha) {
  detail::require_domain(alpha >= 0.0 && std::isfinite(alpha), "alpha must be non-negative");
  return kTheoremCoefficient * std::pow(alpha, 7.0 / 3.0);
}

// alpha^14 / (3645 E_b^5) + E_b, the quantity minimized at the end of the proof.
inline double theorem_objective(double alpha, double E_b) {
  return kLemma2Coefficient * std::pow(alpha, 14.0) / std::pow(E_b, 5.0) + E_b;
}

inline double theorem_argmin(double alpha) { return std::pow(alpha, 7.0 / 3.0) / 3.0; }

// Integrated Lemma 1 for general delta1, delta2:
//   ||W||_Y^2 >= p alpha^2 Y^2 - q Y^3 E_b - r A^2.
struct Lemma1Coefficients {
  double p = 1.0;
  double q = 2.0;
  double r = 4.0;
};

inline Lemma1Coefficients lemma1_coefficients(double delta1, double delta2) {
  detail::require_domain(delta1 > 0.0 && delta1 < 1.0, "delta1 must lie in (0, 1)");
  detail::require_domain(delta2 > 0.0 && std::isfinite(delta2), "delta2 must be positive");
  const double a = 1.0 - delta1;
  return {2.0 * a, a * (1.0 + delta2) / delta1, 2.0 * a * (1.0 + delta2) / (delta1 * delta2)};
}

// Prefactor kappa in E_s >= kappa K(mu) alpha^14 / E_b^5 for given Lemma 1
// coefficients: (pi^4/32) p^7/q^5, or twice that in the published convention.
inline double lemma2_prefactor(const Lemma1Coefficients& c, Convention conv = Convention::published) {
  const double pi4 = std::pow(std::numbers::pi, 4);
  const double k = pi4 / 32.0 * std::pow(c.p, 7) / std::pow(c.q, 5);
  return conv == Convention::published ? 2.0 * k : k;
}

struct ConstantsReport {
  Convention convention = Convention::published;
  double delta1 = 0.5;
  double delta2 = 1.0;
  Lemma1Coefficients lemma1;
  double kappa_prefactor = 0.0;    // pi^4/512 (published) or pi^4/1024 at (1/2, 1)
  double mu_star = 0.0;            // from the Appendix bound K >= 1/105 - mu/6
  double b = 0.0;                  // size constant induced by mu_star
  double mu_star_exact = 0.0;      // root of kappa K(mu) = 1/3645 with the exact K
  double b_exact = 0.0;
  double mu_star_presented = 0.0;  // mu_star truncated to three decimals
  double b_presented = 0.0;        // b at mu_star_presented, truncated to two decimals
  double bound_coefficient = kTheoremCoefficient;
};

namespace detail {

inline double truncate_to(double x, int decimals) {
  const double s = std::pow(10.0, decimals);
  return std::floor(x * s + 1e-9) / s;
}

// Root of f on [lo, hi] for a sign change; TOMS 748 to full precision.
template <class F>
double bracket_root(F f, double lo, double hi) {
  std::uintmax_t iters = 200;
  auto tol = [](double a, double b) { return std::abs(b - a) <= 4.0 * std::numeric_limits<double>::epsilon() * std::abs(a); };
  const auto [a, b] = boost::math::tools::toms748_solve(f, lo, hi, tol, iters);
  return 0.5 * (a + b);
}

}  // namespace detail

// Constants at delta1 = 1/2, delta2 = 1.
inline ConstantsReport optimal_constants(Convention conv = Convention::published) {
  ConstantsReport r;
  r.convention = conv;
  r.lemma1 = lemma1_coefficients(0.5, 1.0);
  r.kappa_prefactor = lemma2_prefactor(r.lemma1, conv);
  r.mu_star = 6.0 * (1.0 / 105.0 - kLemma2Coefficient / r.kappa_prefactor);
  r.b = 0.625 * std::sqrt(r.mu_star);
  const double kp = r.kappa_prefactor;
  r.mu_star_exact = detail::bracket_root([kp](double mu) { return kp * kappa(mu) - kLemma2Coefficient; }, 0.0,
                                         kCubicPeak);
  r.b_exact = 0.625 * std::sqrt(r.mu_star_exact);
  r.mu_star_presented = detail::truncate_to(r.mu_star, 3);
  r.b_presented = detail::truncate_to(0.625 * std::sqrt(r.mu_star_presented), 2);
  return r;
}

// Constants for general (delta1, delta2). mu_star stays at the (1/2, 1)
// value of the same convention, and the Lemma 2 coefficient 1/3645 is
// rescaled by kappa/kappa(1/2, 1), so the margin kappa K(mu*) - c keeps its
// sign. The final coefficient is then (6/5)(5c)^{1/6} and the size constant
// sqrt(mu* p^3 / (r q^2)) / coefficient; (1/2, 1) returns 2/5 and
// (5/8) sqrt(mu*).
inline ConstantsReport generalized_constants(double delta1, double delta2, const ConstantsReport& base) {
  ConstantsReport r;
  r.convention = base.convention;
  const Convention conv = base.convention;
  r.delta1 = delta1;
  r.delta2 = delta2;
  r.lemma1 = lemma1_coefficients(delta1, delta2);
  r.kappa_prefactor = lemma2_prefactor(r.lemma1, conv);
  const double c = kLemma2Coefficient * r.kappa_prefactor / base.kappa_prefactor;
  r.bound_coefficient = 1.2 * std::pow(5.0 * c, 1.0 / 6.0);
  const auto& L = r.lemma1;
  auto size_constant = [&](double mu) {
    return std::sqrt(mu * L.p * L.p * L.p / (L.r * L.q * L.q)) / r.bound_coefficient;
  };
  r.mu_star = base.mu_star;
  r.b = size_constant(r.mu_star);
  r.mu_star_exact = base.mu_star_exact;
  r.b_exact = size_constant(r.mu_star_exact);
  r.mu_star_presented = base.mu_star_presented;
  r.b_presented = detail::truncate_to(size_constant(r.mu_star_presented), 2);
  return r;
}

inline ConstantsReport generalized_constants(double delta1, double delta2, Convention conv = Convention::published) {
  return generalized_constants(delta1, delta2, optimal_constants(conv));
}

struct DeltaSearch {
  ConstantsReport best;
  std::size_t evaluated = 0;
};

// Exhaustive grid over delta1 in (0, 1), delta2 in (0, delta2_max]. Keeps the
// largest bound coefficient whose size constant stays at least b_min.
inline DeltaSearch search_deltas(std::size_t n1 = 199, std::size_t n2 = 400, double delta2_max = 4.0,
                                 double b_min = 0.13, Convention conv = Convention::published) {
  detail::require_domain(n1 > 0 && n2 > 0 && delta2_max > 0.0, "grid search needs a non-empty grid");
  const auto base = optimal_constants(conv);
  DeltaSearch s;
  s.best.bound_coefficient = -std::numeric_limits<double>::infinity();
  for (std::size_t a = 1; a <= n1; ++a) {
    const double d1 = static_cast<double>(a) / static_cast<double>(n1 + 1);
    for (std::size_t k = 1; k <= n2; ++k) {
      const double d2 = delta2_max * static_cast<double>(k) / static_cast<double>(n2);
      const auto c = generalized_constants(d1, d2, base);
      ++s.evaluated;
      if (c.b >= b_min && c.bound_coefficient > s.best.bound_coefficient) s.best = c;
    }
  }
  return s;
}

}  // namespace ridge
