#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "ridge/error.hpp"

namespace ridge {

// Uniform tensor grid on [-1, 1] x [0, y_max]. Node (i, j) sits at
// X = -1 + i h_x, Y = j h_y; storage is row-major in Y (index j * n_x + i).
class GridSpec {
public:
  GridSpec() = default;

  GridSpec(std::size_t n_x, std::size_t n_y, double y_max) : n_x_(n_x), n_y_(n_y), y_max_(y_max) {
    std::vector<std::string> bad;
    if (n_x < 5 || n_x % 2 == 0) bad.push_back("n_x must be odd and >= 5");
    if (n_y < 5) bad.push_back("n_y must be >= 5");
    if (!(y_max > 0.0) || !std::isfinite(y_max)) bad.push_back("y_max must be positive");
    if (!bad.empty()) throw ValidationError(std::move(bad));
  }

  std::size_t n_x() const { return n_x_; }
  std::size_t n_y() const { return n_y_; }
  double y_max() const { return y_max_; }
  double h_x() const { return 2.0 / static_cast<double>(n_x_ - 1); }
  double h_y() const { return y_max_ / static_cast<double>(n_y_ - 1); }
  std::size_t nodes() const { return n_x_ * n_y_; }

  double x(std::size_t i) const { return -1.0 + static_cast<double>(i) * h_x(); }
  double y(std::size_t j) const { return static_cast<double>(j) * h_y(); }
  std::size_t node(std::size_t i, std::size_t j) const { return j * n_x_ + i; }

  bool lateral(std::size_t i) const { return i == 0 || i + 1 == n_x_; }

  // Trapezoid weights.
  double weight_x(std::size_t i) const { return lateral(i) ? 0.5 * h_x() : h_x(); }
  double weight_y(std::size_t j) const { return (j == 0 || j + 1 == n_y_) ? 0.5 * h_y() : h_y(); }

  friend bool operator==(const GridSpec&, const GridSpec&) = default;

private:
  std::size_t n_x_ = 0;
  std::size_t n_y_ = 0;
  double y_max_ = 0.0;
};

// Default truncation 8 max(1, 1.5 alpha^{-1/3}): eight characteristic decay
// lengths of the bending layer (E_b near alpha^{7/3}/3).
inline double default_y_max(double alpha) {
  detail::require_domain(alpha > 0.0, "alpha must be positive");
  return 8.0 * std::max(1.0, 1.5 / std::cbrt(alpha));
}

enum class Component : std::size_t { U = 0, V = 1, W = 2 };

// Rescaled displacements U, V, W sampled on a grid, stored contiguously as
// [U | V | W] so the solver can treat them as one vector.
class FieldSet {
public:
  FieldSet() = default;
  explicit FieldSet(const GridSpec& grid) : grid_(grid), values_(3 * grid.nodes(), 0.0) {}

  const GridSpec& grid() const { return grid_; }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }

  std::span<double> component(Component c) {
    return std::span<double>(values_).subspan(offset(c), grid_.nodes());
  }
  std::span<const double> component(Component c) const {
    return std::span<const double>(values_).subspan(offset(c), grid_.nodes());
  }
  std::span<double> U() { return component(Component::U); }
  std::span<double> V() { return component(Component::V); }
  std::span<double> W() { return component(Component::W); }
  std::span<const double> U() const { return component(Component::U); }
  std::span<const double> V() const { return component(Component::V); }
  std::span<const double> W() const { return component(Component::W); }

  double& u(std::size_t i, std::size_t j) { return values_[grid_.node(i, j)]; }
  double& v(std::size_t i, std::size_t j) { return values_[grid_.nodes() + grid_.node(i, j)]; }
  double& w(std::size_t i, std::size_t j) { return values_[2 * grid_.nodes() + grid_.node(i, j)]; }
  double u(std::size_t i, std::size_t j) const { return values_[grid_.node(i, j)]; }
  double v(std::size_t i, std::size_t j) const { return values_[grid_.nodes() + grid_.node(i, j)]; }
  double w(std::size_t i, std::size_t j) const { return values_[2 * grid_.nodes() + grid_.node(i, j)]; }

  std::size_t offset(Component c) const { return static_cast<std::size_t>(c) * grid_.nodes(); }

  bool all_finite() const {
    return std::all_of(values_.begin(), values_.end(), [](double x) { return std::isfinite(x); });
  }

  // Fill every node from f(X, Y) -> value for one component.
  template <class F>
  void fill(Component c, F&& f) {
    auto dst = component(c);
    for (std::size_t j = 0; j < grid_.n_y(); ++j)
      for (std::size_t i = 0; i < grid_.n_x(); ++i) dst[grid_.node(i, j)] = f(grid_.x(i), grid_.y(j));
  }

  friend bool operator==(const FieldSet&, const FieldSet&) = default;

private:
  GridSpec grid_;
  std::vector<double> values_;
};

}  // namespace ridge
