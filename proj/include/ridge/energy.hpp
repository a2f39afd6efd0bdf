#pragma once

// Discrete rescaled FvK energy.
//
// Every term of the energy is a weighted sum of squared residuals, each
// residual being an affine function of the unknowns plus at most one product
// of two affine functions:
//
//   xx       (U_X + W_X^2)             X-edge midpoints (i+1/2, j)
//   xy       (V_X + U_Y + 2 W_X W_Y)   cell centres (i+1/2, j+1/2), edge averages
//   yy       (V_Y + W_Y^2)             Y-edge midpoints (i, j+1/2)
//   bend_yy  W_YY                      nodes, |X| < 1, ghost row at Y = 0
//   bend_xy  W_XY                      cell centres
//   bend_xx  W_XX                      nodes, |X| < 1
//
// Quadrature is the trapezoid (midpoint on staggered locations). The ghost
// row W(X, -h) = W(X, h) - 2 h slope(X) carries the Neumann condition. On the
// clamped columns W vanishes identically, so W_YY is zero there; W_XX on those
// columns is taken from the adjacent interior column.

#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/SparseCore>

#include "ridge/boundary.hpp"
#include "ridge/error.hpp"
#include "ridge/grid.hpp"

namespace ridge {

enum class Term : std::size_t { xx = 0, xy, yy, bend_yy, bend_xy, bend_xx };
inline constexpr std::size_t kTermCount = 6;

inline constexpr std::array<const char*, kTermCount> kTermNames = {"term_xx", "term_xy", "term_yy",
                                                                  "bend_YY", "bend_XY", "bend_XX"};

// Prefactors of the six terms: 1, eps^{-2/3}/2, eps^{-4/3}, 1, 2 eps^{2/3}, eps^{4/3}.
struct TermPrefactors {
  std::array<double, kTermCount> c{};

  static TermPrefactors rescaled(double epsilon) {
    detail::require_domain(epsilon > 0.0 && std::isfinite(epsilon), "epsilon must be positive");
    const double e13 = std::cbrt(epsilon);
    const double e23 = e13 * e13;
    return {{1.0, 0.5 / e23, 1.0 / (e23 * e23), 1.0, 2.0 * e23, e23 * e23}};
  }
  double operator[](Term t) const { return c[static_cast<std::size_t>(t)]; }
};

struct JacobianEntry {
  std::size_t index;
  double coef;
};

// Calls sink(term, weight, residual, entries, count) for every residual of
// the discrete energy. x is the full [U | V | W] node vector; the Jacobian
// entries index into it.
template <bool WithJacobian, class Sink>
void for_each_residual(const GridSpec& g, std::span<const double> x, std::span<const double> slope, Sink&& sink) {
  const std::size_t nx = g.n_x(), ny = g.n_y(), N = g.nodes();
  detail::require_shape(x.size() == 3 * N, "field vector size does not match grid");
  detail::require_shape(slope.size() == nx, "Neumann slope length must equal n_x");
  const double hx = g.h_x(), hy = g.h_y();
  const double ihx = 1.0 / hx, ihy = 1.0 / hy;
  const double* U = x.data();
  const double* V = U + N;
  const double* W = V + N;
  const std::size_t oV = N, oW = 2 * N;
  std::array<JacobianEntry, 12> e{};

  // xx: (U_X + W_X^2) on X-edges.
  for (std::size_t j = 0; j < ny; ++j) {
    const double wgt = hx * g.weight_y(j);
    for (std::size_t i = 0; i + 1 < nx; ++i) {
      const std::size_t a = j * nx + i, b = a + 1;
      const double dw = (W[b] - W[a]) * ihx;
      const double r = (U[b] - U[a]) * ihx + dw * dw;
      if constexpr (WithJacobian) {
        e[0] = {b, ihx};
        e[1] = {a, -ihx};
        e[2] = {oW + b, 2.0 * dw * ihx};
        e[3] = {oW + a, -2.0 * dw * ihx};
      }
      sink(Term::xx, wgt, r, e.data(), 4);
    }
  }

  // xy: (V_X + U_Y + 2 W_X W_Y) at cell centres.
  {
    const double wgt = hx * hy;
    const double cx = 0.5 * ihx, cy = 0.5 * ihy;
    for (std::size_t j = 0; j + 1 < ny; ++j) {
      for (std::size_t i = 0; i + 1 < nx; ++i) {
        const std::size_t n00 = j * nx + i, n10 = n00 + 1, n01 = n00 + nx, n11 = n01 + 1;
        const double vx = (V[n10] - V[n00] + V[n11] - V[n01]) * cx;
        const double uy = (U[n01] - U[n00] + U[n11] - U[n10]) * cy;
        const double wx = (W[n10] - W[n00] + W[n11] - W[n01]) * cx;
        const double wy = (W[n01] - W[n00] + W[n11] - W[n10]) * cy;
        const double r = vx + uy + 2.0 * wx * wy;
        if constexpr (WithJacobian) {
          e[0] = {oV + n10, cx};
          e[1] = {oV + n00, -cx};
          e[2] = {oV + n11, cx};
          e[3] = {oV + n01, -cx};
          e[4] = {n01, cy};
          e[5] = {n00, -cy};
          e[6] = {n11, cy};
          e[7] = {n10, -cy};
          const double a = 2.0 * wy * cx, b = 2.0 * wx * cy;
          e[8] = {oW + n00, -a - b};
          e[9] = {oW + n10, a - b};
          e[10] = {oW + n01, -a + b};
          e[11] = {oW + n11, a + b};
        }
        sink(Term::xy, wgt, r, e.data(), 12);
      }
    }
  }

  // yy: (V_Y + W_Y^2) on Y-edges.
  for (std::size_t j = 0; j + 1 < ny; ++j) {
    for (std::size_t i = 0; i < nx; ++i) {
      const double wgt = g.weight_x(i) * hy;
      const std::size_t a = j * nx + i, b = a + nx;
      const double dw = (W[b] - W[a]) * ihy;
      const double r = (V[b] - V[a]) * ihy + dw * dw;
      if constexpr (WithJacobian) {
        e[0] = {oV + b, ihy};
        e[1] = {oV + a, -ihy};
        e[2] = {oW + b, 2.0 * dw * ihy};
        e[3] = {oW + a, -2.0 * dw * ihy};
      }
      sink(Term::yy, wgt, r, e.data(), 4);
    }
  }

  // bend_yy: W_YY at nodes of interior columns; row 0 uses the ghost row,
  // the truncation row y_max contributes nothing.
  {
    const double ihy2 = ihy * ihy;
    for (std::size_t j = 0; j + 1 < ny; ++j) {
      for (std::size_t i = 1; i + 1 < nx; ++i) {
        const double wgt = g.weight_x(i) * g.weight_y(j);
        const std::size_t c = j * nx + i;
        double r;
        std::size_t n;
        if (j == 0) {
          r = 2.0 * (W[c + nx] - W[c] - hy * slope[i]) * ihy2;
          if constexpr (WithJacobian) {
            e[0] = {oW + c + nx, 2.0 * ihy2};
            e[1] = {oW + c, -2.0 * ihy2};
          }
          n = 2;
        } else {
          r = (W[c + nx] - 2.0 * W[c] + W[c - nx]) * ihy2;
          if constexpr (WithJacobian) {
            e[0] = {oW + c + nx, ihy2};
            e[1] = {oW + c, -2.0 * ihy2};
            e[2] = {oW + c - nx, ihy2};
          }
          n = 3;
        }
        sink(Term::bend_yy, wgt, r, e.data(), n);
      }
    }
  }

  // bend_xy: W_XY at cell centres.
  {
    const double wgt = hx * hy;
    const double c = ihx * ihy;
    for (std::size_t j = 0; j + 1 < ny; ++j) {
      for (std::size_t i = 0; i + 1 < nx; ++i) {
        const std::size_t n00 = j * nx + i, n10 = n00 + 1, n01 = n00 + nx, n11 = n01 + 1;
        const double r = (W[n11] - W[n01] - W[n10] + W[n00]) * c;
        if constexpr (WithJacobian) {
          e[0] = {oW + n11, c};
          e[1] = {oW + n01, -c};
          e[2] = {oW + n10, -c};
          e[3] = {oW + n00, c};
        }
        sink(Term::bend_xy, wgt, r, e.data(), 4);
      }
    }
  }

  // bend_xx: W_XX at nodes of interior columns; the columns next to the
  // clamped edges also carry the edge's half weight.
  {
    const double ihx2 = ihx * ihx;
    for (std::size_t j = 0; j < ny; ++j) {
      const double wy = g.weight_y(j);
      for (std::size_t i = 1; i + 1 < nx; ++i) {
        const double wx = (i == 1 || i + 2 == nx) ? 1.5 * hx : hx;
        const std::size_t c = j * nx + i;
        const double r = (W[c + 1] - 2.0 * W[c] + W[c - 1]) * ihx2;
        if constexpr (WithJacobian) {
          e[0] = {oW + c + 1, ihx2};
          e[1] = {oW + c, -2.0 * ihx2};
          e[2] = {oW + c - 1, ihx2};
        }
        sink(Term::bend_xx, wx * wy, r, e.data(), 3);
      }
    }
  }
}

// Unweighted (prefactor-free) sum of weight * residual^2 per term.
inline std::array<double, kTermCount> raw_term_sums(const GridSpec& g, std::span<const double> x,
                                                    std::span<const double> slope) {
  std::array<double, kTermCount> s{};
  for_each_residual<false>(g, x, slope, [&](Term t, double w, double r, const JacobianEntry*, std::size_t) {
    s[static_cast<std::size_t>(t)] += w * r * r;
  });
  return s;
}

inline double weighted_energy(const GridSpec& g, std::span<const double> x, std::span<const double> slope,
                              const TermPrefactors& pf) {
  const auto s = raw_term_sums(g, x, slope);
  double total = 0.0;
  for (std::size_t k = 0; k < kTermCount; ++k) total += pf.c[k] * s[k];
  return total;
}

// Energy and its gradient with respect to every node value (no masking).
inline double energy_and_gradient(const GridSpec& g, std::span<const double> x, std::span<const double> slope,
                                  const TermPrefactors& pf, std::span<double> grad) {
  detail::require_shape(grad.size() == x.size(), "gradient buffer size mismatch");
  std::fill(grad.begin(), grad.end(), 0.0);
  std::array<double, kTermCount> s{};
  for_each_residual<true>(g, x, slope, [&](Term t, double w, double r, const JacobianEntry* e, std::size_t n) {
    const auto k = static_cast<std::size_t>(t);
    s[k] += w * r * r;
    const double f = 2.0 * pf.c[k] * w * r;
    for (std::size_t m = 0; m < n; ++m) grad[e[m].index] += f * e[m].coef;
  });
  double total = 0.0;
  for (std::size_t k = 0; k < kTermCount; ++k) total += pf.c[k] * s[k];
  return total;
}

// Energy change I(x + s) - I(x) without cancellation. Every residual is at
// most quadratic in x, so r(x + s) - r(x) = J(x + s/2) s holds exactly and
// the change is sum c w dr (2 r(x) + dr). Near a minimizer the change is far
// below the rounding unit of I itself, which a plain difference cannot see.
inline double energy_change(const GridSpec& g, std::span<const double> x, std::span<const double> s,
                            std::span<const double> slope, const TermPrefactors& pf, std::vector<double>& scratch) {
  detail::require_shape(s.size() == x.size(), "step size mismatch");
  scratch.clear();
  for_each_residual<false>(g, x, slope,
                           [&](Term, double, double r, const JacobianEntry*, std::size_t) { scratch.push_back(r); });
  std::vector<double> mid(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) mid[k] = x[k] + 0.5 * s[k];
  std::size_t idx = 0;
  double change = 0.0;
  for_each_residual<true>(g, mid, slope, [&](Term t, double w, double, const JacobianEntry* e, std::size_t n) {
    double dr = 0.0;
    for (std::size_t m = 0; m < n; ++m) dr += e[m].coef * s[e[m].index];
    change += pf[t] * w * dr * (2.0 * scratch[idx++] + dr);
  });
  return change;
}

// Gauss-Newton matrix 2 sum_k c w J^T J restricted to the free unknowns.
// Pinned unknowns get a unit diagonal so the matrix keeps full size. Only
// the lower triangle is stored.
inline Eigen::SparseMatrix<double> gauss_newton_matrix(const GridSpec& g, std::span<const double> x,
                                                       std::span<const double> slope, const TermPrefactors& pf,
                                                       std::span<const unsigned char> free) {
  using Triplet = Eigen::Triplet<double, int>;
  std::vector<Triplet> trip;
  trip.reserve(g.nodes() * 120);
  for_each_residual<true>(g, x, slope, [&](Term t, double w, double, const JacobianEntry* e, std::size_t n) {
    const double f = 2.0 * pf.c[static_cast<std::size_t>(t)] * w;
    for (std::size_t a = 0; a < n; ++a) {
      if (!free[e[a].index]) continue;
      for (std::size_t b = 0; b < n; ++b) {
        if (!free[e[b].index] || e[b].index > e[a].index) continue;
        trip.emplace_back(static_cast<int>(e[a].index), static_cast<int>(e[b].index), f * e[a].coef * e[b].coef);
      }
    }
  });
  for (std::size_t k = 0; k < free.size(); ++k)
    if (!free[k]) trip.emplace_back(static_cast<int>(k), static_cast<int>(k), 1.0);
  const auto n = static_cast<Eigen::Index>(x.size());
  Eigen::SparseMatrix<double> H(n, n);
  H.setFromTriplets(trip.begin(), trip.end());
  return H;
}

// ---------------------------------------------------------------------------
// Reduced functional E(W) = E_s + E_b.

struct ReducedEnergy {
  double E = 0.0;
  double E_s = 0.0;
  double E_b = 0.0;
  std::vector<double> tau;             // per row j: sum over X-edges h (W_X)^2
  std::vector<double> bending_column;  // per column i: sum over rows w_j W_YY^2
};

inline ReducedEnergy reduced_energy(const GridSpec& g, std::span<const double> W, std::span<const double> slope) {
  const std::size_t nx = g.n_x(), ny = g.n_y();
  detail::require_shape(W.size() == g.nodes(), "W size does not match grid");
  detail::require_shape(slope.size() == nx, "Neumann slope length must equal n_x");
  const double hx = g.h_x(), hy = g.h_y();
  ReducedEnergy out;
  out.tau.assign(ny, 0.0);
  out.bending_column.assign(nx, 0.0);
  for (std::size_t j = 0; j < ny; ++j) {
    double t = 0.0;
    for (std::size_t i = 0; i + 1 < nx; ++i) {
      const double d = (W[j * nx + i + 1] - W[j * nx + i]) / hx;
      t += hx * d * d;
    }
    out.tau[j] = t;
    out.E_s += g.weight_y(j) * 0.5 * t * t;
  }
  const double ihy2 = 1.0 / (hy * hy);
  for (std::size_t i = 1; i + 1 < nx; ++i) {
    double col = 0.0;
    for (std::size_t j = 0; j + 1 < ny; ++j) {
      const std::size_t c = j * nx + i;
      const double r = (j == 0) ? 2.0 * (W[c + nx] - W[c] - hy * slope[i]) * ihy2
                                : (W[c + nx] - 2.0 * W[c] + W[c - nx]) * ihy2;
      col += g.weight_y(j) * r * r;
    }
    out.bending_column[i] = col;
    out.E_b += g.weight_x(i) * col;
  }
  out.E = out.E_s + out.E_b;
  return out;
}

inline ReducedEnergy reduced_energy(const FieldSet& f, const BoundaryData& b) {
  return reduced_energy(f.grid(), f.W(), b.slope);
}

// ---------------------------------------------------------------------------

struct EnergyBreakdown {
  std::array<double, kTermCount> terms{};  // prefactors included
  double total_I = 0.0;
  double reduced_E = 0.0;
  double E_b = 0.0;
  double E_s = 0.0;

  double term(Term t) const { return terms[static_cast<std::size_t>(t)]; }
  double membrane() const { return terms[0] + terms[1] + terms[2]; }
  double bending() const { return terms[3] + terms[4] + terms[5]; }
};

inline EnergyBreakdown energy_rescaled(const FieldSet& f, double epsilon, const BoundaryData& b) {
  const auto pf = TermPrefactors::rescaled(epsilon);
  const auto s = raw_term_sums(f.grid(), f.values(), b.slope);
  EnergyBreakdown out;
  for (std::size_t k = 0; k < kTermCount; ++k) {
    out.terms[k] = pf.c[k] * s[k];
    out.total_I += out.terms[k];
  }
  const auto red = reduced_energy(f, b);
  out.reduced_E = red.E;
  out.E_b = red.E_b;
  out.E_s = red.E_s;
  return out;
}

// Gradient of the discrete total I; entries of Dirichlet nodes are zero.
inline FieldSet gradient(const FieldSet& f, double epsilon, const BoundaryData& b) {
  FieldSet g(f.grid());
  energy_and_gradient(f.grid(), f.values(), b.slope, TermPrefactors::rescaled(epsilon), g.values());
  const auto mask = free_mask(f.grid());
  auto gv = g.values();
  for (std::size_t k = 0; k < gv.size(); ++k)
    if (!mask[k]) gv[k] = 0.0;
  return g;
}

// ---------------------------------------------------------------------------
// Strains at their staggered locations.

struct StrainFields {
  std::size_t n_x = 0, n_y = 0;
  std::vector<double> gamma_xx;  // (n_x - 1) x n_y, X-edge (i+1/2, j)
  std::vector<double> gamma_xy;  // (n_x - 1) x (n_y - 1), cell (i+1/2, j+1/2)
  std::vector<double> gamma_yy;  // n_x x (n_y - 1), Y-edge (i, j+1/2)

  double xx(std::size_t i, std::size_t j) const { return gamma_xx[j * (n_x - 1) + i]; }
  double xy(std::size_t i, std::size_t j) const { return gamma_xy[j * (n_x - 1) + i]; }
  double yy(std::size_t i, std::size_t j) const { return gamma_yy[j * n_x + i]; }
};

inline StrainFields strains(const FieldSet& f) {
  const GridSpec& g = f.grid();
  StrainFields s;
  s.n_x = g.n_x();
  s.n_y = g.n_y();
  s.gamma_xx.reserve((s.n_x - 1) * s.n_y);
  s.gamma_xy.reserve((s.n_x - 1) * (s.n_y - 1));
  s.gamma_yy.reserve(s.n_x * (s.n_y - 1));
  const std::vector<double> no_slope(g.n_x(), 0.0);
  for_each_residual<false>(g, f.values(), no_slope, [&](Term t, double, double r, const JacobianEntry*, std::size_t) {
    switch (t) {
      case Term::xx: s.gamma_xx.push_back(r); break;
      case Term::xy: s.gamma_xy.push_back(r); break;
      case Term::yy: s.gamma_yy.push_back(r); break;
      default: break;
    }
  });
  return s;
}

}  // namespace ridge
