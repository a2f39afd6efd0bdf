#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "ridge/boundary.hpp"
#include "ridge/certificate.hpp"
#include "ridge/params.hpp"
#include "ridge/solve.hpp"

namespace ridge {

enum class BoundaryFamily { zero, quadratic_bump };

inline const char* to_string(BoundaryFamily f) { return f == BoundaryFamily::zero ? "zero" : "quadratic_bump"; }

struct SweepSpec {
  std::vector<double> epsilons;
  std::vector<double> alphas;
  std::size_t n_x = 65;
  std::size_t n_y = 129;
  std::optional<double> y_max;  // default_y_max(alpha) when unset
  double L = 1.0;
  BoundaryFamily family = BoundaryFamily::zero;
  double size_fraction = 0.05;  // quadratic bump amplitude as a fraction of b alpha^{2/3}
  SolveOptions solve;
  DiscreteTolerance tolerance;
  std::size_t workers = 1;
};

struct SweepRecord {
  std::size_t index = 0;
  double epsilon = 0.0;
  double alpha = 0.0;
  double sigma = 0.0;
  double L = 1.0;
  double A = 0.0;
  double I_min = 0.0;
  double physical_energy = 0.0;
  double E_b = 0.0;
  double E_s = 0.0;
  bool converged = false;
  bool certificate_pass = false;
  std::size_t iterations = 0;
  double final_gradient_norm = 0.0;
  std::string status;
  std::string message;
  std::size_t n_x = 0, n_y = 0;
  double y_max = 0.0;

  bool retained() const { return converged && certificate_pass; }
};

inline BoundaryData make_boundary(const GridSpec& g, BoundaryFamily family, double alpha, double fraction) {
  return family == BoundaryFamily::zero ? zero_boundary(g, alpha) : quadratic_bump(g, alpha, fraction);
}

// One (epsilon, alpha) point: continuation solve, then certification.
// Failures are recorded in the status, never thrown.
inline SweepRecord run_point(const SweepSpec& spec, std::size_t index, double epsilon, double alpha) {
  SweepRecord r;
  r.index = index;
  r.epsilon = epsilon;
  r.alpha = alpha;
  r.L = spec.L;
  r.sigma = epsilon * spec.L;
  r.n_x = spec.n_x;
  r.n_y = spec.n_y;
  try {
    const GridSpec g(spec.n_x, spec.n_y, spec.y_max.value_or(default_y_max(alpha)));
    r.y_max = g.y_max();
    const auto b = make_boundary(g, spec.family, alpha, spec.size_fraction);
    r.A = b.A_measured();
    const auto params = params_from_dimensionless(epsilon, r.A, alpha, spec.L);
    MinimizeResult res;
    try {
      res = continuation_minimize(b, epsilon, g, spec.solve);
    } catch (const LineSearchError& e) {
      res = e.last_iterate();
      r.message = e.what();
    }
    r.I_min = res.breakdown.total_I;
    r.physical_energy = unscale_energy(r.I_min, params);
    r.E_b = res.breakdown.E_b;
    r.E_s = res.breakdown.E_s;
    r.converged = res.converged;
    r.iterations = res.iterations;
    r.final_gradient_norm = res.final_gradient_norm;
    r.status = to_string(res.status);
    r.certificate_pass = certify(res.fields, b, params, spec.tolerance).pass;
  } catch (const Error& e) {
    r.status = "error";
    r.message = e.what();
  }
  return r;
}

// Runs every (alpha, epsilon) pair, alpha-major. Points run on `workers`
// threads; `sink` sees the records one at a time in index order, whatever the
// completion order, so incremental output is deterministic.
inline std::vector<SweepRecord> run_sweep(const SweepSpec& spec,
                                          const std::function<void(const SweepRecord&)>& sink = {}) {
  std::vector<std::string> bad;
  if (spec.epsilons.empty()) bad.push_back("epsilon list is empty");
  if (spec.alphas.empty()) bad.push_back("alpha list is empty");
  for (double e : spec.epsilons)
    if (!(e > 0.0)) bad.push_back("epsilons must be positive");
  for (double a : spec.alphas)
    if (!(a > 0.0)) bad.push_back("alphas must be positive");
  if (spec.workers == 0) bad.push_back("workers must be at least 1");
  if (!bad.empty()) throw ValidationError(std::move(bad));
  spec.solve.validate();

  struct Point {
    double epsilon, alpha;
  };
  std::vector<Point> points;
  for (double a : spec.alphas)
    for (double e : spec.epsilons) points.push_back({e, a});

  std::vector<std::optional<SweepRecord>> done(points.size());
  std::atomic<std::size_t> next{0};
  std::mutex mu;
  std::size_t emitted = 0;

  auto work = [&] {
    for (std::size_t k = next++; k < points.size(); k = next++) {
      auto rec = run_point(spec, k, points[k].epsilon, points[k].alpha);
      std::lock_guard lock(mu);
      done[k] = std::move(rec);
      while (emitted < done.size() && done[emitted]) {
        if (sink) sink(*done[emitted]);
        ++emitted;
      }
    }
  };
  const std::size_t n = std::min(spec.workers, points.size());
  {
    std::vector<std::jthread> pool;
    for (std::size_t t = 1; t < n; ++t) pool.emplace_back(work);
    work();
  }
  std::vector<SweepRecord> out;
  out.reserve(done.size());
  for (auto& r : done) out.push_back(std::move(*r));
  return out;
}

struct ScalingFit {
  std::string parameter_name;
  double exponent = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // RMS in natural-log units
  std::size_t points = 0;
  double span = 0.0;      // max/min of the parameter
};

// Least-squares fit of log(physical energy) against log(parameter).
inline ScalingFit fit_power_law(std::span<const double> x, std::span<const double> y, std::string name,
                                double min_span = 10.0) {
  detail::require_shape(x.size() == y.size(), "fit inputs differ in length");
  if (x.size() < 4) throw PreconditionError("a scaling fit needs at least 4 points");
  for (std::size_t k = 0; k < x.size(); ++k)
    if (!(x[k] > 0.0) || !(y[k] > 0.0)) throw DomainError("fit data must be positive");
  const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
  ScalingFit f;
  f.parameter_name = std::move(name);
  f.points = x.size();
  f.span = *hi / *lo;
  if (!(f.span >= min_span * (1.0 - 1e-12)))
    throw PreconditionError("fit data span a factor " + std::to_string(f.span) + ", need " + std::to_string(min_span));
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    mx += std::log(x[k]);
    my += std::log(y[k]);
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double dx = std::log(x[k]) - mx, dy = std::log(y[k]) - my;
    sxx += dx * dx;
    sxy += dx * dy;
  }
  if (!(sxx > 0.0)) throw PreconditionError("degenerate spread in the fit parameter");
  f.exponent = sxy / sxx;
  f.intercept = my - f.exponent * mx;
  double ss = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double res = std::log(y[k]) - (f.intercept + f.exponent * std::log(x[k]));
    ss += res * res;
  }
  f.residual = std::sqrt(ss / n);
  return f;
}

// Exponent of physical energy against "sigma", "epsilon" or "alpha" over the
// retained records; the other parameter must be constant.
inline ScalingFit fit_exponent(std::span<const SweepRecord> records, const std::string& parameter,
                               double min_span = 10.0) {
  if (parameter != "sigma" && parameter != "epsilon" && parameter != "alpha")
    throw DomainError("unknown fit parameter '" + parameter + "' (sigma, epsilon or alpha)");
  const bool by_alpha = parameter == "alpha";
  std::vector<double> x, y;
  std::optional<double> fixed;
  for (const auto& r : records) {
    if (!r.retained()) continue;
    const double other = by_alpha ? r.sigma : r.alpha;
    if (!fixed) fixed = other;
    if (std::abs(other - *fixed) > 1e-12 * std::abs(*fixed))
      throw PreconditionError("records vary in more than the fit parameter");
    x.push_back(parameter == "sigma" ? r.sigma : parameter == "epsilon" ? r.epsilon : r.alpha);
    y.push_back(r.physical_energy);
  }
  return fit_power_law(x, y, parameter, min_span);
}

struct CrossoverResult {
  double phi = 0.0;
  double L = 0.0;
  double a = 0.0;
  double sigma_star = 0.0;
  double epsilon_star = 0.0;
};

// sigma^{5/3} L^{1/3} = 100 phi^2 sigma^2 log(L/a) has the single positive
// root sigma = L / (100 phi^2 log(L/a))^3. Only roots with sigma <= L count.
inline CrossoverResult crossover_thickness(double phi, double L, double a) {
  detail::require_domain(phi > 0.0 && std::isfinite(phi), "phi must be positive");
  detail::require_domain(L > 0.0 && std::isfinite(L), "L must be positive");
  detail::require_domain(a > 0.0 && a < L, "core radius must satisfy 0 < a < L");
  const double k = 100.0 * phi * phi * std::log(L / a);
  CrossoverResult r{phi, L, a, 0.0, 0.0};
  r.epsilon_star = 1.0 / (k * k * k);
  if (!(r.epsilon_star <= 1.0 + 1e-12) || !std::isfinite(r.epsilon_star))
    throw DomainError("no crossover thickness with sigma <= L for these parameters");
  r.sigma_star = r.epsilon_star * L;
  return r;
}

inline double ridge_energy_estimate(double sigma, double L) { return std::pow(sigma, 5.0 / 3.0) * std::cbrt(L); }

inline double vertex_energy_estimate(double phi, double sigma, double L, double a) {
  return 100.0 * phi * phi * sigma * sigma * std::log(L / a);
}

struct BlisterBand {
  double lower = 0.0;
  double upper = 0.0;
};

// c lambda^{3/2} sigma L <= energy <= C lambda^{3/2} sigma L.
inline BlisterBand blister_band(double lambda, double sigma, double L, double c, double C) {
  detail::require_domain(lambda > 0.0 && sigma > 0.0 && L > 0.0 && c > 0.0 && C > 0.0,
                         "blister band inputs must be positive");
  detail::require_domain(c <= C, "band constants need c <= C");
  const double s = std::pow(lambda, 1.5) * sigma * L;
  return {c * s, C * s};
}

struct OverlayRow {
  double sigma;
  double ridge;
  double blister_lower;
  double blister_upper;
};

// Ridge fit exp(intercept) sigma^exponent next to the blister band, on a
// log-spaced sigma grid, for two-column plot tables.
inline std::vector<OverlayRow> overlay_table(const ScalingFit& fit, double lambda, double L, double c, double C,
                                             double sigma_lo, double sigma_hi, std::size_t n) {
  detail::require_domain(sigma_lo > 0.0 && sigma_hi > sigma_lo && n >= 2, "overlay needs a positive sigma range");
  std::vector<OverlayRow> rows;
  for (std::size_t k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) / static_cast<double>(n - 1);
    const double s = sigma_lo * std::pow(sigma_hi / sigma_lo, t);
    const auto band = blister_band(lambda, s, L, c, C);
    rows.push_back({s, std::exp(fit.intercept) * std::pow(s, fit.exponent), band.lower, band.upper});
  }
  return rows;
}

}  // namespace ridge
