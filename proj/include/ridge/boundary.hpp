#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "ridge/error.hpp"
#include "ridge/grid.hpp"
#include "ridge/params.hpp"

namespace ridge {

// Dirichlet data at Y = 0 plus the Neumann slope W_Y(X, 0).
//
// The slope is stored per column. Production runs use the constant alpha;
// the per-column form exists so closed-form test fields (whose W_Y at Y = 0
// varies with X) can be evaluated with a consistent ghost row.
struct BoundaryData {
  double alpha = 0.0;
  std::vector<double> V0;
  std::vector<double> W0;
  std::vector<double> slope;

  double A_measured() const {
    double m = 0.0;
    for (double x : V0) m = std::max(m, std::abs(x));
    for (double x : W0) m = std::max(m, std::abs(x));
    return m;
  }

  bool constant_slope() const {
    return std::all_of(slope.begin(), slope.end(), [&](double s) { return s == alpha; });
  }
};

inline void validate_boundary(const BoundaryData& b, const GridSpec& grid) {
  const auto n = grid.n_x();
  detail::require_shape(b.V0.size() == n && b.W0.size() == n && b.slope.size() == n,
                        "boundary data length must equal n_x");
  for (auto i : {std::size_t{0}, n - 1}) {
    if (b.V0[i] != 0.0 || b.W0[i] != 0.0)
      throw PreconditionError("boundary data must vanish at X = +-1 (clamped edges)");
  }
}

inline BoundaryData zero_boundary(const GridSpec& grid, double alpha) {
  const auto n = grid.n_x();
  return BoundaryData{alpha, std::vector<double>(n, 0.0), std::vector<double>(n, 0.0),
                      std::vector<double>(n, alpha)};
}

// V0 = -A (1 - X^2), W0 = A (1 - X^2); amplitude A = fraction * b alpha^{2/3},
// so any fraction <= 1 satisfies the size condition by construction.
inline BoundaryData quadratic_bump(const GridSpec& grid, double alpha, double fraction) {
  detail::require_domain(alpha > 0.0, "alpha must be positive");
  detail::require_domain(fraction >= 0.0, "size fraction must be non-negative");
  const double amp = fraction * size_bound_rescaled(alpha);
  BoundaryData b = zero_boundary(grid, alpha);
  for (std::size_t i = 1; i + 1 < grid.n_x(); ++i) {
    const double X = grid.x(i);
    b.V0[i] = -amp * (1.0 - X * X);
    b.W0[i] = amp * (1.0 - X * X);
  }
  return b;
}

inline BoundaryData tabulated_boundary(const GridSpec& grid, double alpha, std::vector<double> V0,
                                       std::vector<double> W0) {
  BoundaryData b{alpha, std::move(V0), std::move(W0), std::vector<double>(grid.n_x(), alpha)};
  validate_boundary(b, grid);
  return b;
}

// Degrees of freedom left to the minimizer. U is free on Y = 0 (no Dirichlet
// condition there); V and W are pinned to V0 and W0.
inline bool is_free(const GridSpec& g, Component c, std::size_t i, std::size_t j) {
  if (g.lateral(i) || j + 1 == g.n_y()) return false;
  return c == Component::U || j > 0;
}

inline std::vector<unsigned char> free_mask(const GridSpec& g) {
  std::vector<unsigned char> mask(3 * g.nodes(), 0);
  for (auto c : {Component::U, Component::V, Component::W})
    for (std::size_t j = 0; j < g.n_y(); ++j)
      for (std::size_t i = 0; i < g.n_x(); ++i)
        mask[static_cast<std::size_t>(c) * g.nodes() + g.node(i, j)] = is_free(g, c, i, j);
  return mask;
}

// Overwrites the Dirichlet nodes: U = V = W = 0 on X = +-1 and on Y = y_max,
// V = V0 and W = W0 on Y = 0. Interior values are left untouched.
inline FieldSet apply_boundary_conditions(FieldSet fields, const BoundaryData& b) {
  const GridSpec& g = fields.grid();
  validate_boundary(b, g);
  const auto nx = g.n_x(), ny = g.n_y();
  for (std::size_t j = 0; j < ny; ++j) {
    for (auto i : {std::size_t{0}, nx - 1}) fields.u(i, j) = fields.v(i, j) = fields.w(i, j) = 0.0;
  }
  for (std::size_t i = 0; i < nx; ++i) {
    fields.u(i, ny - 1) = fields.v(i, ny - 1) = fields.w(i, ny - 1) = 0.0;
    if (!g.lateral(i)) {
      fields.v(i, 0) = b.V0[i];
      fields.w(i, 0) = b.W0[i];
    }
  }
  return fields;
}

struct AdmissibilityReport {
  double lateral = 0.0;   // max |U|,|V|,|W| on X = +-1
  double bottom_v = 0.0;  // max |V - V0| on Y = 0
  double bottom_w = 0.0;  // max |W - W0| on Y = 0
  double far = 0.0;       // max |U|,|V|,|W| on Y = y_max
  bool finite = true;
  bool pass = true;

  double max_violation() const { return std::max({lateral, bottom_v, bottom_w, far}); }
};

inline AdmissibilityReport admissibility_check(const FieldSet& f, const BoundaryData& b, double tol) {
  const GridSpec& g = f.grid();
  detail::require_shape(b.V0.size() == g.n_x() && b.W0.size() == g.n_x(), "boundary data length must equal n_x");
  AdmissibilityReport r;
  const auto nx = g.n_x(), ny = g.n_y();
  auto worst = [](double& acc, double v) { acc = std::max(acc, std::abs(v)); };
  for (std::size_t j = 0; j < ny; ++j)
    for (auto i : {std::size_t{0}, nx - 1}) {
      worst(r.lateral, f.u(i, j));
      worst(r.lateral, f.v(i, j));
      worst(r.lateral, f.w(i, j));
    }
  for (std::size_t i = 0; i < nx; ++i) {
    worst(r.far, f.u(i, ny - 1));
    worst(r.far, f.v(i, ny - 1));
    worst(r.far, f.w(i, ny - 1));
    worst(r.bottom_v, f.v(i, 0) - b.V0[i]);
    worst(r.bottom_w, f.w(i, 0) - b.W0[i]);
  }
  r.finite = f.all_finite();
  r.pass = r.finite && r.max_violation() <= tol;
  return r;
}

}  // namespace ridge
