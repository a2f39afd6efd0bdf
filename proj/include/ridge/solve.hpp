#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/SparseCholesky>

#include "ridge/boundary.hpp"
#include "ridge/energy.hpp"
#include "ridge/grid.hpp"
#include "ridge/lbfgs.hpp"

namespace ridge {

struct SolveOptions {
  std::size_t max_iterations = 4000;
  double gradient_tolerance = 1e-7;
  std::size_t memory = 12;
  std::size_t preconditioner_refresh = 20;
  std::vector<double> continuation_ladder;  // empty: solve directly at the target epsilon
  std::uint64_t seed = 0;
  double init_noise = 0.0;  // amplitude of seeded Gaussian noise on the initial guess

  void validate() const {
    std::vector<std::string> bad;
    if (!(gradient_tolerance > 0.0)) bad.push_back("gradient_tolerance must be positive");
    if (max_iterations == 0) bad.push_back("max_iterations must be positive");
    if (memory == 0) bad.push_back("memory must be positive");
    if (init_noise < 0.0) bad.push_back("init_noise must be non-negative");
    for (std::size_t k = 0; k < continuation_ladder.size(); ++k) {
      if (!(continuation_ladder[k] > 0.0)) bad.push_back("continuation ladder entries must be positive");
      if (k > 0 && !(continuation_ladder[k] < continuation_ladder[k - 1]))
        bad.push_back("continuation ladder must be strictly decreasing");
    }
    if (!bad.empty()) throw ValidationError(std::move(bad));
  }
};

struct MinimizeResult {
  FieldSet fields;
  EnergyBreakdown breakdown;
  std::size_t iterations = 0;
  double final_gradient_norm = 0.0;
  bool converged = false;
  SolveStatus status = SolveStatus::max_iterations;
  std::vector<double> energy_history;
};

// Raised when the line search cannot decrease the energy; carries the last
// accepted iterate.
class LineSearchError : public Error {
public:
  LineSearchError(const std::string& what, MinimizeResult last) : Error(what), last_(std::move(last)) {}
  const char* kind() const noexcept override { return "line_search"; }
  const MinimizeResult& last_iterate() const noexcept { return last_; }

private:
  MinimizeResult last_;
};

// Max over nodes of |g| / (nodal quadrature weight): the gradient as a
// density, comparable across meshes.
inline double gradient_density_norm(const GridSpec& grid, std::span<const double> g) {
  detail::require_shape(g.size() == 3 * grid.nodes(), "gradient size does not match grid");
  double m = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    const std::size_t n = k % grid.nodes();
    const std::size_t i = n % grid.n_x(), j = n / grid.n_x();
    m = std::max(m, std::abs(g[k]) / (grid.weight_x(i) * grid.weight_y(j)));
  }
  return m;
}

// Discrete rescaled energy restricted to the free unknowns. The initial
// inverse-Hessian operator is the inverse of the Gauss-Newton matrix, which
// absorbs both the eps^{-4/3} stiffness and the h^{-4} bending scaling.
class RidgeObjective {
public:
  RidgeObjective(const GridSpec& grid, const BoundaryData& boundary, double epsilon)
      : grid_(grid), slope_(boundary.slope), pf_(TermPrefactors::rescaled(epsilon)), free_(free_mask(grid)) {
    validate_boundary(boundary, grid);
    inv_weight_.resize(3 * grid.nodes());
    for (std::size_t c = 0; c < 3; ++c)
      for (std::size_t j = 0; j < grid.n_y(); ++j)
        for (std::size_t i = 0; i < grid.n_x(); ++i)
          inv_weight_[c * grid.nodes() + grid.node(i, j)] = 1.0 / (grid.weight_x(i) * grid.weight_y(j));
  }

  void set_epsilon(double epsilon) { pf_ = TermPrefactors::rescaled(epsilon); }

  double value(std::span<const double> x) const { return weighted_energy(grid_, x, slope_, pf_); }

  double value_change(std::span<const double> x, std::span<const double> step) {
    return energy_change(grid_, x, step, slope_, pf_, scratch_);
  }

  double value_and_gradient(std::span<const double> x, std::span<double> g) const {
    const double f = energy_and_gradient(grid_, x, slope_, pf_, g);
    for (std::size_t k = 0; k < g.size(); ++k)
      if (!free_[k]) g[k] = 0.0;
    return f;
  }

  // Max-norm of the gradient density (gradient over nodal quadrature weight),
  // which is independent of the mesh size for smooth fields.
  double gradient_norm(std::span<const double> g) const {
    double m = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) m = std::max(m, std::abs(g[k]) * inv_weight_[k]);
    return m;
  }

  void refresh_preconditioner(std::span<const double> x) {
    const auto H = gauss_newton_matrix(grid_, x, slope_, pf_, free_);
    if (!analyzed_) {
      ldlt_.analyzePattern(H);
      analyzed_ = true;
    }
    ldlt_.factorize(H);
    factored_ = ldlt_.info() == Eigen::Success;
  }

  void apply_preconditioner(std::span<const double> in, std::span<double> out) const {
    const Eigen::Map<const Eigen::VectorXd> b(in.data(), static_cast<Eigen::Index>(in.size()));
    Eigen::Map<Eigen::VectorXd> r(out.data(), static_cast<Eigen::Index>(out.size()));
    if (factored_) {
      r = ldlt_.solve(b);
    } else {
      r = b;
    }
    for (std::size_t k = 0; k < out.size(); ++k)
      if (!free_[k]) out[k] = 0.0;
  }

  const std::vector<unsigned char>& free() const { return free_; }

private:
  GridSpec grid_;
  std::vector<double> slope_;
  TermPrefactors pf_;
  std::vector<unsigned char> free_;
  std::vector<double> inv_weight_;
  std::vector<double> scratch_;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>, Eigen::Lower, Eigen::AMDOrdering<int>> ldlt_;
  bool analyzed_ = false;
  bool factored_ = false;
};

// Characteristic decay length 3/2 alpha^{-1/3} of the bending layer.
inline double characteristic_length(double alpha) { return 1.5 / std::cbrt(alpha); }

// W = alpha Y exp(-Y / Y~), U = V = 0, then the Dirichlet rows; optional
// seeded Gaussian noise on the free unknowns.
inline FieldSet initial_guess(const GridSpec& grid, const BoundaryData& b, double init_noise = 0.0,
                              std::uint64_t seed = 0) {
  FieldSet f(grid);
  if (b.alpha > 0.0) {
    const double ell = characteristic_length(b.alpha);
    f.fill(Component::W, [&](double, double Y) { return b.alpha * Y * std::exp(-Y / ell); });
  }
  if (init_noise > 0.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, init_noise);
    const auto mask = free_mask(grid);
    auto v = f.values();
    for (std::size_t k = 0; k < v.size(); ++k)
      if (mask[k]) v[k] += normal(rng);
  }
  return apply_boundary_conditions(std::move(f), b);
}

namespace detail {

inline LbfgsOptions lbfgs_options(const SolveOptions& o) {
  LbfgsOptions l;
  l.max_iterations = o.max_iterations;
  l.gradient_tolerance = o.gradient_tolerance;
  l.memory = o.memory;
  l.preconditioner_refresh = o.preconditioner_refresh;
  return l;
}

inline MinimizeResult finish(FieldSet fields, const BoundaryData& b, double epsilon, const LbfgsOutcome& out,
                             std::size_t iterations, std::vector<double> history) {
  MinimizeResult r;
  r.breakdown = energy_rescaled(fields, epsilon, b);
  r.fields = std::move(fields);
  r.iterations = iterations;
  r.final_gradient_norm = out.gradient_norm;
  r.status = out.status;
  r.converged = out.status == SolveStatus::converged;
  r.energy_history = std::move(history);
  if (out.status == SolveStatus::line_search_failed)
    throw LineSearchError("line search failed to decrease the energy at epsilon = " + std::to_string(epsilon),
                          std::move(r));
  return r;
}

}  // namespace detail

// Minimizes the discrete energy at fixed epsilon starting from `start`.
// Throws LineSearchError (with the last iterate) if no descent step exists.
inline MinimizeResult minimize_from(FieldSet start, const BoundaryData& b, double epsilon, const SolveOptions& opt) {
  opt.validate();
  FieldSet fields = apply_boundary_conditions(std::move(start), b);
  RidgeObjective obj(fields.grid(), b, epsilon);
  std::vector<double> x(fields.values().begin(), fields.values().end());
  auto out = lbfgs_minimize(obj, x, detail::lbfgs_options(opt));
  std::copy(x.begin(), x.end(), fields.values().begin());
  auto history = out.history;
  return detail::finish(std::move(fields), b, epsilon, out, out.iterations, std::move(history));
}

inline MinimizeResult minimize(const BoundaryData& b, double epsilon, const GridSpec& grid, const SolveOptions& opt) {
  return minimize_from(initial_guess(grid, b, opt.init_noise, opt.seed), b, epsilon, opt);
}

// Walks the ladder, warm-starting every rung from the previous minimizer.
// Rungs at or below the target are dropped and the target is always solved
// last, so an empty ladder reduces to plain minimize().
inline MinimizeResult continuation_minimize(const BoundaryData& b, double epsilon, const GridSpec& grid,
                                            const SolveOptions& opt) {
  opt.validate();
  std::vector<double> rungs;
  for (double e : opt.continuation_ladder)
    if (e > epsilon) rungs.push_back(e);
  rungs.push_back(epsilon);

  FieldSet fields = initial_guess(grid, b, opt.init_noise, opt.seed);
  std::size_t iterations = 0;
  std::vector<double> history;
  LbfgsOutcome last;
  for (double e : rungs) {
    RidgeObjective obj(grid, b, e);
    std::vector<double> x(fields.values().begin(), fields.values().end());
    last = lbfgs_minimize(obj, x, detail::lbfgs_options(opt));
    std::copy(x.begin(), x.end(), fields.values().begin());
    iterations += last.iterations;
    if (e == epsilon) history = last.history;
    // A failed rung ends the walk; the result then reports that failure.
    if (last.status == SolveStatus::line_search_failed) break;
  }
  return detail::finish(std::move(fields), b, epsilon, last, iterations, std::move(history));
}

}  // namespace ridge
