#pragma once

// Numerical certificate of the lower-bound chain on a discrete field.
//
// Profiles follow the discrete energy: rho from the same W_YY stencil (ghost
// row at Y = 0) and trapezoid weights in Y, tau from the X-edge differences.
// ||W||_Y^2 is the trapezoid sum in X, except in the Poincare step, which uses
// the exact L2 norm of the piecewise-linear interpolant; that interpolant is
// an H^1_0 function, so the discrete Poincare inequality holds exactly.
//
// Every inequality passes when margin >= -tol_disc * scale, with
// tol_disc = c (h_X^2 + h_Y^2) and scale the sum of the magnitudes of the
// terms of that inequality.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "ridge/boundary.hpp"
#include "ridge/constants.hpp"
#include "ridge/energy.hpp"
#include "ridge/grid.hpp"
#include "ridge/kappa.hpp"
#include "ridge/params.hpp"

namespace ridge {

// Relative slack c (h_x^2 + h_y^2). No fixture (random, adversarial or
// solver output) produced a negative margin, so c only has to cover roundoff.
inline constexpr double kTolDiscConstant = 0.01;

struct DiscreteTolerance {
  double c = kTolDiscConstant;
  double value(const GridSpec& g) const { return c * (g.h_x() * g.h_x() + g.h_y() * g.h_y()); }
};

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// rho(X_i) = 1 / sum_j w_j W_YY(i, j)^2; +inf for zero bending content and on
// the clamped columns.
inline std::vector<double> rho_profile(const GridSpec& g, std::span<const double> W, std::span<const double> slope) {
  const auto red = reduced_energy(g, W, slope);
  std::vector<double> rho(g.n_x(), kInfinity);
  for (std::size_t i = 0; i < g.n_x(); ++i)
    if (red.bending_column[i] > 0.0) rho[i] = 1.0 / red.bending_column[i];
  return rho;
}

// tau(Y_j) = ||W_X||^2 at row j.
inline std::vector<double> tau_profile(const GridSpec& g, std::span<const double> W) {
  const std::vector<double> zero(g.n_x(), 0.0);
  return reduced_energy(g, W, zero).tau;
}

// ||W||_Y^2 by the trapezoid rule.
inline std::vector<double> norm_profile(const GridSpec& g, std::span<const double> W) {
  detail::require_shape(W.size() == g.nodes(), "W size does not match grid");
  std::vector<double> out(g.n_y(), 0.0);
  for (std::size_t j = 0; j < g.n_y(); ++j)
    for (std::size_t i = 0; i < g.n_x(); ++i) out[j] += g.weight_x(i) * W[g.node(i, j)] * W[g.node(i, j)];
  return out;
}

// ||W||_Y^2 of the piecewise-linear interpolant, integrated exactly.
inline std::vector<double> interpolant_norm_profile(const GridSpec& g, std::span<const double> W) {
  detail::require_shape(W.size() == g.nodes(), "W size does not match grid");
  const double h3 = g.h_x() / 3.0;
  std::vector<double> out(g.n_y(), 0.0);
  for (std::size_t j = 0; j < g.n_y(); ++j)
    for (std::size_t i = 0; i + 1 < g.n_x(); ++i) {
      const double a = W[g.node(i, j)], b = W[g.node(i + 1, j)];
      out[j] += h3 * (a * a + a * b + b * b);
    }
  return out;
}

struct MarginReport {
  double min_margin = 0.0;      // smallest absolute margin
  double worst_relative = 0.0;  // smallest margin / scale
  double at_x = 0.0;            // location of the smallest relative margin
  double at_y = 0.0;
  std::size_t checked = 0;
  bool pass = true;
};

namespace detail {

struct MarginAccumulator {
  double tol;
  MarginReport r;
  bool first = true;

  void add(double margin, double scale, double x, double y) {
    const double rel = scale > 0.0 ? margin / scale : (margin < 0.0 ? -kInfinity : 0.0);
    if (first || margin < r.min_margin) r.min_margin = margin;
    if (first || rel < r.worst_relative) {
      r.worst_relative = rel;
      r.at_x = x;
      r.at_y = y;
    }
    first = false;
    ++r.checked;
    if (rel < -tol) r.pass = false;
  }
};

inline void require_clamped(const GridSpec& g, std::span<const double> W) {
  detail::require_shape(W.size() == g.nodes(), "W size does not match grid");
  for (std::size_t j = 0; j < g.n_y(); ++j)
    if (W[g.node(0, j)] != 0.0 || W[g.node(g.n_x() - 1, j)] != 0.0)
      throw PreconditionError("W must vanish on X = +-1");
}

// Lemma 1 and the local bound need W on the Dirichlet rows, |W0| <= A, and
// the constant Neumann slope alpha.
inline void require_lemma1_hypotheses(const FieldSet& f, const BoundaryData& b, double A) {
  const GridSpec& g = f.grid();
  validate_boundary(b, g);
  require_clamped(g, f.W());
  if (!b.constant_slope()) throw PreconditionError("certification needs the constant slope W_Y(X, 0) = alpha");
  for (std::size_t i = 0; i < g.n_x(); ++i) {
    if (f.w(i, 0) != b.W0[i]) throw PreconditionError("W does not match W0 on Y = 0");
    if (std::abs(b.W0[i]) > A * (1.0 + 1e-12)) throw PreconditionError("boundary data exceed the amplitude A");
  }
}

}  // namespace detail

// tau(Y) >= (pi^2/4) ||W||_Y^2 row by row.
inline MarginReport poincare_check(const GridSpec& g, std::span<const double> W, double tol) {
  detail::require_clamped(g, W);
  const auto tau = tau_profile(g, W);
  const auto m = interpolant_norm_profile(g, W);
  const double c = std::numbers::pi * std::numbers::pi / 4.0;
  detail::MarginAccumulator acc{tol, {}};
  for (std::size_t j = 0; j < g.n_y(); ++j) acc.add(tau[j] - c * m[j], tau[j] + c * m[j], 0.0, g.y(j));
  return acc.r;
}

// ||W||_Y^2 >= alpha^2 Y^2 - 2 Y^3 E_b - 4 A^2 row by row.
inline MarginReport lemma1_check(const FieldSet& f, const BoundaryData& b, double A, double tol) {
  detail::require_lemma1_hypotheses(f, b, A);
  const GridSpec& g = f.grid();
  const auto norm = norm_profile(g, f.W());
  const double E_b = reduced_energy(f, b).E_b;
  const double a2 = b.alpha * b.alpha, A2 = A * A;
  detail::MarginAccumulator acc{tol, {}};
  for (std::size_t j = 0; j < g.n_y(); ++j) {
    const double Y = g.y(j);
    const double rhs = a2 * Y * Y - 2.0 * Y * Y * Y * E_b - 4.0 * A2;
    acc.add(norm[j] - rhs, norm[j] + a2 * Y * Y + 2.0 * Y * Y * Y * E_b + 4.0 * A2, 0.0, Y);
  }
  return acc.r;
}

// W^2 >= (1/2) alpha^2 Y^2 - 2 Y^3 / rho(X) - 2 A^2 at every node of every
// column with finite rho.
inline MarginReport local_bound_check(const FieldSet& f, const BoundaryData& b, double A, double tol) {
  detail::require_lemma1_hypotheses(f, b, A);
  const GridSpec& g = f.grid();
  const auto rho = rho_profile(g, f.W(), b.slope);
  const double a2 = b.alpha * b.alpha, A2 = A * A;
  detail::MarginAccumulator acc{tol, {}};
  for (std::size_t i = 0; i < g.n_x(); ++i) {
    if (!std::isfinite(rho[i])) continue;
    const double inv = 1.0 / rho[i];
    for (std::size_t j = 0; j < g.n_y(); ++j) {
      const double Y = g.y(j), w = f.w(i, j);
      const double t1 = 0.5 * a2 * Y * Y, t2 = 2.0 * Y * Y * Y * inv, t3 = 2.0 * A2;
      acc.add(w * w - (t1 - t2 - t3), w * w + t1 + t2 + t3, g.x(i), Y);
    }
  }
  return acc.r;
}

enum class Lemma2Status { pass, fail, hypothesis_not_met, degenerate };

inline const char* to_string(Lemma2Status s) {
  switch (s) {
    case Lemma2Status::pass: return "pass";
    case Lemma2Status::fail: return "fail";
    case Lemma2Status::hypothesis_not_met: return "hypothesis_not_met";
    case Lemma2Status::degenerate: return "degenerate";
  }
  return "unknown";
}

struct Lemma2Report {
  double mu = 0.0;
  double mu_star = 0.0;
  double bound = 0.0;   // alpha^14 / (3645 E_b^5)
  double margin = 0.0;  // E_s - bound when the hypothesis holds
  Lemma2Status status = Lemma2Status::degenerate;

  bool ok() const { return status != Lemma2Status::fail; }
};

// mu = (4 E_b A / alpha^3)^2; zero when E_b A = 0, +inf when alpha = 0 < E_b A.
inline double mu_parameter(double E_b, double alpha, double A) {
  const double num = 4.0 * E_b * A;
  if (num == 0.0) return 0.0;
  if (alpha == 0.0) return kInfinity;
  const double m = num / (alpha * alpha * alpha);
  return m * m;
}

inline Lemma2Report lemma2_check(double E_b, double E_s, double alpha, double A, double tol,
                                 double mu_star = optimal_constants().mu_star_presented) {
  detail::require_domain(E_b >= 0.0 && E_s >= 0.0 && alpha >= 0.0 && A >= 0.0,
                         "lemma 2 inputs must be non-negative");
  Lemma2Report r;
  r.mu_star = mu_star;
  r.mu = mu_parameter(E_b, alpha, A);
  if (E_b == 0.0) {
    r.status = Lemma2Status::degenerate;
    return r;
  }
  if (!(r.mu < mu_star)) {
    r.status = Lemma2Status::hypothesis_not_met;
    return r;
  }
  r.bound = kLemma2Coefficient * std::pow(alpha, 14.0) / std::pow(E_b, 5.0);
  r.margin = E_s - r.bound;
  const double scale = E_s + r.bound;
  r.status = (scale == 0.0 || r.margin / scale >= -tol) ? Lemma2Status::pass : Lemma2Status::fail;
  return r;
}

struct Certificate {
  std::vector<double> rho_profile;
  std::vector<double> tau_profile;
  std::vector<double> norm_profile;
  double alpha = 0.0;
  double A = 0.0;
  double epsilon = 0.0;
  double total_I = 0.0;
  double reduced_E = 0.0;
  double E_b = 0.0;
  double E_s = 0.0;
  double mu = 0.0;
  double kappa_mu = 0.0;
  double Y_tilde = 0.0;
  double tol_disc = 0.0;

  MarginReport lemma1;
  MarginReport local_bound;
  MarginReport poincare;
  double jensen_margin = 0.0;
  bool jensen_pass = true;
  Lemma2Report lemma2;
  double theorem_bound = 0.0;
  double theorem_margin = 0.0;
  bool theorem_pass = true;
  double appendix_margin = 0.0;
  bool appendix_pass = true;
  bool size_condition_ok = true;
  bool pass = true;
};

// Full chain on an admissible field. params supplies epsilon, alpha and A.
inline Certificate certify(const FieldSet& f, const BoundaryData& b, const ProblemParams& params,
                           DiscreteTolerance tol = {}) {
  const GridSpec& g = f.grid();
  validate_boundary(b, g);
  if (b.alpha != params.alpha) throw PreconditionError("boundary slope does not match params.alpha");
  const auto adm = admissibility_check(f, b, 1e-12);
  if (!adm.pass) throw PreconditionError("fields are not admissible");

  Certificate c;
  c.alpha = params.alpha;
  c.A = params.A;
  c.epsilon = params.epsilon;
  c.tol_disc = tol.value(g);

  const auto br = energy_rescaled(f, params.epsilon, b);
  const auto red = reduced_energy(f, b);
  c.total_I = br.total_I;
  c.reduced_E = red.E;
  c.E_b = red.E_b;
  c.E_s = red.E_s;
  c.rho_profile = rho_profile(g, f.W(), b.slope);
  c.tau_profile = red.tau;
  c.norm_profile = norm_profile(g, f.W());

  c.mu = mu_parameter(c.E_b, c.alpha, c.A);
  c.kappa_mu = std::isfinite(c.mu) ? kappa(c.mu) : 0.0;
  c.Y_tilde = c.E_b > 0.0 ? c.alpha * c.alpha / (2.0 * c.E_b) : kInfinity;

  c.lemma1 = lemma1_check(f, b, c.A, c.tol_disc);
  c.local_bound = local_bound_check(f, b, c.A, c.tol_disc);
  c.poincare = poincare_check(g, f.W(), c.tol_disc);

  c.jensen_margin = c.total_I - c.reduced_E;
  const double jscale = c.total_I + c.reduced_E;
  c.jensen_pass = jscale == 0.0 || c.jensen_margin / jscale >= -c.tol_disc;

  c.lemma2 = lemma2_check(c.E_b, c.E_s, c.alpha, c.A, c.tol_disc);

  c.size_condition_ok = size_condition_holds(c.A, c.alpha);
  c.theorem_bound = ridge::theorem_bound(c.alpha);
  c.theorem_margin = c.total_I - c.theorem_bound;
  const double tscale = c.total_I + c.theorem_bound;
  c.theorem_pass = !c.size_condition_ok || tscale == 0.0 || c.theorem_margin / tscale >= -c.tol_disc;

  if (std::isfinite(c.mu)) {
    c.appendix_margin = c.kappa_mu - kappa_lower_bound(c.mu);
    c.appendix_pass = c.appendix_margin >= -1e-12;
  }

  c.pass = c.lemma1.pass && c.local_bound.pass && c.poincare.pass && c.jensen_pass && c.lemma2.ok() &&
           c.theorem_pass && c.appendix_pass;
  return c;
}

}  // namespace ridge
