#pragma once

// Unscaled energy in physical variables, with the -1 of the linearized
// strains kept explicitly:
//
//   (u_x + w_x^2 - 1)^2 + 1/2 (v_x + u_y + 2 w_x w_y)^2 + (v_y + w_y^2 - 1)^2
//   + sigma^2 (w_xx^2 + 2 w_xy^2 + w_yy^2)
//
// Same staggered stencils and weights as the rescaled assembly, written out
// separately so the two can be checked against each other.

#include <cmath>
#include <span>
#include <vector>

#include "ridge/boundary.hpp"
#include "ridge/error.hpp"
#include "ridge/grid.hpp"
#include "ridge/params.hpp"

namespace ridge {

// Positions u, v and deflection w on the grid x in [-L, L], y in [0, y_max].
// Storage is row-major in y, as in FieldSet.
struct PhysicalFields {
  double sigma = 0.0;
  double L = 0.0;
  double y_max = 0.0;
  std::size_t n_x = 0, n_y = 0;
  std::vector<double> u, v, w;
  std::vector<double> slope;  // w_y at y = 0 per column (ghost row)

  double h_x() const { return 2.0 * L / static_cast<double>(n_x - 1); }
  double h_y() const { return y_max / static_cast<double>(n_y - 1); }
  double x(std::size_t i) const { return -L + static_cast<double>(i) * h_x(); }
  double y(std::size_t j) const { return static_cast<double>(j) * h_y(); }
};

// Undoes the rescaling: x = L X, y = s Y, u = x + sigma^{2/3} L^{1/3} U,
// v = y + s V, w = s W with s = sigma^{1/3} L^{2/3}.
inline PhysicalFields map_to_physical(const FieldSet& f, const BoundaryData& b, const ProblemParams& p) {
  const GridSpec& g = f.grid();
  validate_boundary(b, g);
  const double ys = p.y_scale(), us = p.u_scale();
  PhysicalFields out;
  out.sigma = p.sigma;
  out.L = p.L;
  out.y_max = g.y_max() * ys;
  out.n_x = g.n_x();
  out.n_y = g.n_y();
  out.u.resize(g.nodes());
  out.v.resize(g.nodes());
  out.w.resize(g.nodes());
  for (std::size_t j = 0; j < g.n_y(); ++j)
    for (std::size_t i = 0; i < g.n_x(); ++i) {
      const std::size_t n = g.node(i, j);
      out.u[n] = p.L * g.x(i) + us * f.u(i, j);
      out.v[n] = ys * g.y(j) + ys * f.v(i, j);
      out.w[n] = ys * f.w(i, j);
    }
  out.slope = b.slope;
  return out;
}

inline double energy_unscaled(const PhysicalFields& f) {
  detail::require_domain(f.sigma > 0.0, "sigma must be positive");
  detail::require_domain(f.L > 0.0 && f.y_max > 0.0, "physical grid extents must be positive");
  const std::size_t nx = f.n_x, ny = f.n_y;
  detail::require_shape(nx >= 3 && ny >= 3, "physical grid too small");
  detail::require_shape(f.u.size() == nx * ny && f.v.size() == nx * ny && f.w.size() == nx * ny,
                        "physical fields do not match the grid");
  detail::require_shape(f.slope.size() == nx, "slope length must equal n_x");
  const double hx = f.h_x(), hy = f.h_y();
  auto at = [nx](std::size_t i, std::size_t j) { return j * nx + i; };
  auto wy_node = [&](std::size_t j) { return (j == 0 || j + 1 == ny) ? 0.5 * hy : hy; };
  auto wx_node = [&](std::size_t i) { return (i == 0 || i + 1 == nx) ? 0.5 * hx : hx; };
  const auto& u = f.u;
  const auto& v = f.v;
  const auto& w = f.w;

  double membrane = 0.0, bending = 0.0;
  for (std::size_t j = 0; j < ny; ++j)
    for (std::size_t i = 0; i + 1 < nx; ++i) {
      const double ux = (u[at(i + 1, j)] - u[at(i, j)]) / hx;
      const double wx = (w[at(i + 1, j)] - w[at(i, j)]) / hx;
      const double g = ux + wx * wx - 1.0;
      membrane += hx * wy_node(j) * g * g;
    }
  for (std::size_t j = 0; j + 1 < ny; ++j)
    for (std::size_t i = 0; i + 1 < nx; ++i) {
      const double vx = 0.5 * (v[at(i + 1, j)] - v[at(i, j)] + v[at(i + 1, j + 1)] - v[at(i, j + 1)]) / hx;
      const double uy = 0.5 * (u[at(i, j + 1)] - u[at(i, j)] + u[at(i + 1, j + 1)] - u[at(i + 1, j)]) / hy;
      const double wx = 0.5 * (w[at(i + 1, j)] - w[at(i, j)] + w[at(i + 1, j + 1)] - w[at(i, j + 1)]) / hx;
      const double wy = 0.5 * (w[at(i, j + 1)] - w[at(i, j)] + w[at(i + 1, j + 1)] - w[at(i + 1, j)]) / hy;
      const double g = vx + uy + 2.0 * wx * wy;
      membrane += hx * hy * 0.5 * g * g;
      const double wxy = (w[at(i + 1, j + 1)] - w[at(i, j + 1)] - w[at(i + 1, j)] + w[at(i, j)]) / (hx * hy);
      bending += hx * hy * 2.0 * wxy * wxy;
    }
  for (std::size_t j = 0; j + 1 < ny; ++j)
    for (std::size_t i = 0; i < nx; ++i) {
      const double vy = (v[at(i, j + 1)] - v[at(i, j)]) / hy;
      const double wy = (w[at(i, j + 1)] - w[at(i, j)]) / hy;
      const double g = vy + wy * wy - 1.0;
      membrane += wx_node(i) * hy * g * g;
    }
  for (std::size_t j = 0; j + 1 < ny; ++j)
    for (std::size_t i = 1; i + 1 < nx; ++i) {
      double wyy;
      if (j == 0) {
        wyy = 2.0 * (w[at(i, 1)] - w[at(i, 0)] - hy * f.slope[i]) / (hy * hy);
      } else {
        wyy = (w[at(i, j + 1)] - 2.0 * w[at(i, j)] + w[at(i, j - 1)]) / (hy * hy);
      }
      bending += wx_node(i) * wy_node(j) * wyy * wyy;
    }
  for (std::size_t j = 0; j < ny; ++j)
    for (std::size_t i = 1; i + 1 < nx; ++i) {
      const double wt = (i == 1 || i + 2 == nx) ? 1.5 * hx : hx;
      const double wxx = (w[at(i + 1, j)] - 2.0 * w[at(i, j)] + w[at(i - 1, j)]) / (hx * hx);
      bending += wt * wy_node(j) * wxx * wxx;
    }
  return membrane + f.sigma * f.sigma * bending;
}

}  // namespace ridge
