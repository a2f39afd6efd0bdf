#pragma once

#include <cmath>
#include <cstddef>
#include <deque>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace ridge {

enum class SolveStatus { converged, max_iterations, line_search_failed };

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::converged: return "converged";
    case SolveStatus::max_iterations: return "max_iterations";
    case SolveStatus::line_search_failed: return "line_search_failed";
  }
  return "unknown";
}

struct LbfgsOptions {
  std::size_t max_iterations = 4000;
  double gradient_tolerance = 1e-7;
  std::size_t memory = 12;
  std::size_t preconditioner_refresh = 20;  // iterations between operator rebuilds; 0 = never
  double armijo = 1e-4;
  std::size_t max_backtracks = 40;
};

struct LbfgsOutcome {
  SolveStatus status = SolveStatus::max_iterations;
  std::size_t iterations = 0;
  double value = 0.0;
  double gradient_norm = std::numeric_limits<double>::infinity();
  std::vector<double> history;  // objective after each accepted step (first entry: start)
};

namespace detail {
inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}
}  // namespace detail

// Limited-memory BFGS with backtracking (Armijo) line search.
//
// Problem must provide
//   double value(span<const double> x)
//   double value_and_gradient(span<const double> x, span<double> g)
//   double gradient_norm(span<const double> g)
//   void refresh_preconditioner(span<const double> x)
//   void apply_preconditioner(span<const double> in, span<double> out)
// and may provide
//   double value_change(span<const double> x, span<const double> step)
// returning f(x + step) - f(x) accurately; the line search then tests
// sufficient decrease on that difference instead of on two rounded values.
// The preconditioner is the initial inverse-Hessian operator of the two-loop
// recursion. Accepted steps never increase the objective; with value_change
// the recorded history is f(x0) plus the accumulated exact decrements.
template <class Problem>
LbfgsOutcome lbfgs_minimize(Problem& problem, std::vector<double>& x, const LbfgsOptions& opt) {
  const std::size_t n = x.size();
  std::vector<double> g(n), g_new(n), d(n), x_new(n), q(n), r(n), step(n);
  struct Pair {
    std::vector<double> s, y;
    double rho;
  };
  std::deque<Pair> memory;
  std::vector<double> alpha_buf;

  LbfgsOutcome out;
  problem.refresh_preconditioner(x);
  double f = problem.value_and_gradient(x, g);
  out.history.push_back(f);
  out.gradient_norm = problem.gradient_norm(g);
  std::size_t since_refresh = 0;

  auto direction = [&] {
    q = g;
    alpha_buf.assign(memory.size(), 0.0);
    for (std::size_t k = memory.size(); k-- > 0;) {
      const auto& p = memory[k];
      alpha_buf[k] = p.rho * detail::dot(p.s, q);
      for (std::size_t m = 0; m < n; ++m) q[m] -= alpha_buf[k] * p.y[m];
    }
    problem.apply_preconditioner(q, r);
    for (std::size_t k = 0; k < memory.size(); ++k) {
      const auto& p = memory[k];
      const double beta = p.rho * detail::dot(p.y, r);
      for (std::size_t m = 0; m < n; ++m) r[m] += p.s[m] * (alpha_buf[k] - beta);
    }
    for (std::size_t m = 0; m < n; ++m) d[m] = -r[m];
  };

  bool retried = false;
  for (out.iterations = 0; out.iterations < opt.max_iterations; ++out.iterations) {
    if (out.gradient_norm <= opt.gradient_tolerance) {
      out.status = SolveStatus::converged;
      out.value = f;
      return out;
    }
    if (opt.preconditioner_refresh > 0 && since_refresh >= opt.preconditioner_refresh) {
      problem.refresh_preconditioner(x);
      since_refresh = 0;
    }
    direction();
    double slope = detail::dot(g, d);
    if (!(slope < 0.0)) {
      memory.clear();
      direction();
      slope = detail::dot(g, d);
    }

    double t = 1.0, f_new = f;
    bool accepted = false;
    for (std::size_t bt = 0; bt < opt.max_backtracks && slope < 0.0; ++bt) {
      for (std::size_t m = 0; m < n; ++m) step[m] = t * d[m];
      for (std::size_t m = 0; m < n; ++m) x_new[m] = x[m] + step[m];
      double change;
      if constexpr (requires { problem.value_change(std::span<const double>(x), std::span<const double>(step)); }) {
        change = problem.value_change(x, step);
      } else {
        change = problem.value(x_new) - f;
      }
      if (std::isfinite(change) && change <= opt.armijo * t * slope && change <= 0.0) {
        f_new = f + change;
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) {
      // One retry from a fresh operator and empty memory before giving up.
      if (retried) {
        out.status = SolveStatus::line_search_failed;
        out.value = f;
        return out;
      }
      retried = true;
      memory.clear();
      problem.refresh_preconditioner(x);
      since_refresh = 0;
      continue;
    }
    retried = false;

    [[maybe_unused]] const double f_direct = problem.value_and_gradient(x_new, g_new);
    if constexpr (!requires { problem.value_change(std::span<const double>(x), std::span<const double>(step)); })
      f_new = f_direct;
    Pair p{std::vector<double>(n), std::vector<double>(n), 0.0};
    for (std::size_t m = 0; m < n; ++m) {
      p.s[m] = x_new[m] - x[m];
      p.y[m] = g_new[m] - g[m];
    }
    const double sy = detail::dot(p.s, p.y);
    if (sy > 1e-14 * std::sqrt(detail::dot(p.s, p.s) * detail::dot(p.y, p.y))) {
      p.rho = 1.0 / sy;
      memory.push_back(std::move(p));
      if (memory.size() > opt.memory) memory.pop_front();
    }
    x.swap(x_new);
    g.swap(g_new);
    f = f_new;
    out.history.push_back(f);
    out.gradient_norm = problem.gradient_norm(g);
    ++since_refresh;
  }
  out.status = out.gradient_norm <= opt.gradient_tolerance ? SolveStatus::converged : SolveStatus::max_iterations;
  out.value = f;
  return out;
}

}  // namespace ridge
