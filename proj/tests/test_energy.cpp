#include <gtest/gtest.h>

#include <numbers>
#include <random>

#include "ridge/ridge.hpp"
#include "support.hpp"

using namespace ridge;
using ridge::testing::exp_fixture;
using ridge::testing::random_admissible;

namespace {

constexpr double kPi = std::numbers::pi;

// pi^2/2 + 1/4
const double kSinExact = kPi * kPi / 2.0 + 0.25;
// 8/5 + 32/105 + 64/315 + 8/15 + 8/3 + 4
const double kExpExact = 8.0 / 5.0 + 32.0 / 105.0 + 64.0 / 315.0 + 8.0 / 15.0 + 8.0 / 3.0 + 4.0;

double sin_energy(std::size_t n_x, std::size_t n_y, double y_max) {
  const GridSpec g(n_x, n_y, y_max);
  FieldSet f(g);
  f.fill(Component::U, [](double X, double Y) { return std::sin(kPi * X) * std::exp(-Y); });
  return energy_rescaled(f, 1.0, zero_boundary(g, 0.0)).total_I;
}

double exp_energy(std::size_t n_x, std::size_t n_y, double y_max) {
  const auto fx = exp_fixture(n_x, n_y, y_max);
  return energy_rescaled(fx.fields, 1.0, fx.boundary).total_I;
}

FieldSet random_fields(const GridSpec& g, std::mt19937_64& rng, double scale) {
  std::normal_distribution<double> n(0.0, scale);
  FieldSet f(g);
  for (auto& v : f.values()) v = n(rng);
  return f;
}

}  // namespace

TEST(Energy, ClosedFormValues) {
  EXPECT_NEAR(kSinExact, 5.18480, 1e-5);
  EXPECT_NEAR(kExpExact, 9.30794, 1e-5);
}

TEST(Energy, ZeroFieldsZeroEnergy) {
  const GridSpec g(9, 9, 4.0);
  for (double eps : {1e-3, 0.1, 1.0}) {
    const auto br = energy_rescaled(FieldSet(g), eps, zero_boundary(g, 0.0));
    EXPECT_EQ(br.total_I, 0.0);
    EXPECT_EQ(br.reduced_E, 0.0);
  }
}

TEST(Energy, RejectsNonPositiveEpsilon) {
  const GridSpec g(9, 9, 4.0);
  EXPECT_THROW(energy_rescaled(FieldSet(g), 0.0, zero_boundary(g, 0.0)), DomainError);
  EXPECT_THROW(energy_rescaled(FieldSet(g), -1.0, zero_boundary(g, 0.0)), DomainError);
}

TEST(Energy, SinFixtureConvergesSecondOrder) {
  const double e1 = std::abs(sin_energy(17, 129, 16.0) - kSinExact);
  const double e2 = std::abs(sin_energy(33, 257, 16.0) - kSinExact);
  const double e3 = std::abs(sin_energy(65, 513, 16.0) - kSinExact);
  EXPECT_LT(e3 / kSinExact, 1e-3);
  EXPECT_GE(std::log2(e1 / e2), 1.9);
  EXPECT_GE(std::log2(e2 / e3), 1.9);
}

TEST(Energy, ExpFixtureConvergesSecondOrder) {
  const double e1 = std::abs(exp_energy(17, 129, 16.0) - kExpExact);
  const double e2 = std::abs(exp_energy(33, 257, 16.0) - kExpExact);
  const double e3 = std::abs(exp_energy(65, 513, 16.0) - kExpExact);
  EXPECT_LT(e3 / kExpExact, 1e-3);
  EXPECT_GE(std::log2(e1 / e2), 1.9);
  EXPECT_GE(std::log2(e2 / e3), 1.9);
}

TEST(Energy, ExpFixtureTermByTerm) {
  const auto fx = exp_fixture(129, 1025, 16.0);
  const auto br = energy_rescaled(fx.fields, 1.0, fx.boundary);
  EXPECT_NEAR(br.term(Term::xx), 8.0 / 5.0, 2e-3);
  EXPECT_NEAR(br.term(Term::xy), 32.0 / 105.0, 2e-3);
  EXPECT_NEAR(br.term(Term::yy), 64.0 / 315.0, 2e-3);
  EXPECT_NEAR(br.term(Term::bend_yy), 8.0 / 15.0, 2e-3);
  EXPECT_NEAR(br.term(Term::bend_xy), 8.0 / 3.0, 2e-3);
  EXPECT_NEAR(br.term(Term::bend_xx), 4.0, 2e-3);
}

TEST(Energy, ReducedEnergyOfExpFixture) {
  // (1/2) int (8/3)^2 e^{-4Y} dY + int int (1 - X^2)^2 e^{-2Y} = 8/9 + 8/15
  const auto fx = exp_fixture(129, 1025, 16.0);
  const auto red = reduced_energy(fx.fields, fx.boundary);
  EXPECT_NEAR(red.E, 64.0 / 45.0, 2e-3);
  EXPECT_NEAR(red.E_s, 8.0 / 9.0, 2e-3);
  EXPECT_NEAR(red.E_b, 8.0 / 15.0, 2e-3);
}

TEST(Energy, TermsSumAndNonNegative) {
  std::mt19937_64 rng(3);
  const GridSpec g(17, 21, 6.0);
  for (int k = 0; k < 50; ++k) {
    const auto f = random_fields(g, rng, 0.3);
    const auto br = energy_rescaled(f, 0.05 + 0.9 * (k % 7) / 6.0, zero_boundary(g, 0.2));
    double s = 0.0;
    for (double t : br.terms) {
      EXPECT_GE(t, 0.0);
      s += t;
    }
    EXPECT_NEAR(br.total_I, s, 1e-12 * s);
    EXPECT_GE(br.E_b, 0.0);
    EXPECT_GE(br.E_s, 0.0);
  }
}

TEST(Energy, BendingScalesQuadratically) {
  std::mt19937_64 rng(4);
  const GridSpec g(17, 21, 6.0);
  auto f = random_fields(g, rng, 1.0);
  std::fill(f.U().begin(), f.U().end(), 0.0);
  std::fill(f.V().begin(), f.V().end(), 0.0);
  const auto b = zero_boundary(g, 0.0);
  const auto base = energy_rescaled(f, 0.3, b);
  for (double t : {0.5, 3.0}) {
    FieldSet s = f;
    for (auto& w : s.W()) w *= t;
    const auto br = energy_rescaled(s, 0.3, b);
    for (auto term : {Term::bend_yy, Term::bend_xy, Term::bend_xx})
      EXPECT_NEAR(br.term(term), t * t * base.term(term), 1e-12 * t * t * base.term(term));
  }
}

TEST(Energy, JensenReductionOnRandomFields) {
  std::mt19937_64 rng(5);
  for (auto [nx, ny] : {std::pair{9u, 9u}, std::pair{17u, 33u}, std::pair{33u, 65u}}) {
    const GridSpec g(nx, ny, 8.0);
    for (int k = 0; k < 30; ++k) {
      auto [f, b] = random_admissible(g, 0.05 + 0.01 * k, (k % 2) * 0.02, rng, 0.1 * (k % 4));
      for (double eps : {0.01, 0.3, 1.0}) {
        const auto br = energy_rescaled(f, eps, b);
        EXPECT_GE(br.total_I - br.reduced_E, -1e-12 * br.total_I);
      }
    }
  }
}

TEST(Energy, StrainsOfZeroFields) {
  const GridSpec g(9, 9, 4.0);
  const auto s = strains(FieldSet(g));
  for (const auto* v : {&s.gamma_xx, &s.gamma_xy, &s.gamma_yy})
    for (double x : *v) EXPECT_EQ(x, 0.0);
  EXPECT_EQ(s.gamma_xx.size(), 8u * 9u);
  EXPECT_EQ(s.gamma_xy.size(), 8u * 8u);
  EXPECT_EQ(s.gamma_yy.size(), 9u * 8u);
}

TEST(Energy, StrainsDecoupleForU) {
  const GridSpec g(9, 9, 4.0);
  FieldSet f(g);
  f.fill(Component::U, [](double X, double) { return X * (1.0 - X * X); });
  const auto s = strains(f);
  for (std::size_t j = 0; j < g.n_y(); ++j)
    for (std::size_t i = 0; i + 1 < g.n_x(); ++i)
      EXPECT_NEAR(s.xx(i, j), (f.u(i + 1, j) - f.u(i, j)) / g.h_x(), 1e-14);
  for (double x : s.gamma_xy) EXPECT_NEAR(x, 0.0, 1e-14);
  for (double x : s.gamma_yy) EXPECT_EQ(x, 0.0);
}

TEST(Energy, StrainAtOriginForExpFixture) {
  for (std::size_t n : {65u, 257u}) {
    const auto fx = exp_fixture(n, n, 4.0);
    const auto s = strains(fx.fields);
    const double h = 4.0 / static_cast<double>(n - 1);
    EXPECT_NEAR(s.yy((n - 1) / 2, 0), 1.0, 1.5 * h);
  }
}

TEST(Energy, EnergyChangeMatchesDifference) {
  std::mt19937_64 rng(6);
  const GridSpec g(9, 11, 4.0);
  const auto b = zero_boundary(g, 0.2);
  const auto pf = TermPrefactors::rescaled(0.1);
  std::vector<double> scratch;
  for (int k = 0; k < 20; ++k) {
    const auto x = random_fields(g, rng, 0.5);
    const auto s = random_fields(g, rng, 1e-3);
    std::vector<double> xs(x.values().begin(), x.values().end());
    for (std::size_t q = 0; q < xs.size(); ++q) xs[q] += s.values()[q];
    const double direct = weighted_energy(g, xs, b.slope, pf) - weighted_energy(g, x.values(), b.slope, pf);
    const double exact = energy_change(g, x.values(), s.values(), b.slope, pf, scratch);
    EXPECT_NEAR(exact, direct, 1e-9 * std::abs(weighted_energy(g, x.values(), b.slope, pf)));
  }
}

TEST(Gradient, ZeroAtZero) {
  const GridSpec g(9, 9, 4.0);
  const auto gr = gradient(FieldSet(g), 0.5, zero_boundary(g, 0.0));
  for (double v : gr.values()) EXPECT_EQ(v, 0.0);
}

TEST(Gradient, MatchesCentralDifferences) {
  std::mt19937_64 rng(7);
  const GridSpec g(9, 11, 4.0);
  const auto b = quadratic_bump(g, 0.2, 0.5);
  const auto mask = free_mask(g);
  for (int k = 0; k < 10; ++k) {
    const double eps = k % 2 ? 0.1 : 1.0;
    const auto f = apply_boundary_conditions(random_fields(g, rng, 0.3), b);
    const auto an = gradient(f, eps, b);
    double worst = 0.0, scale = 0.0;
    for (std::size_t q = 0; q < f.values().size(); ++q) {
      scale = std::max(scale, std::abs(an.values()[q]));
      if (!mask[q]) {
        EXPECT_EQ(an.values()[q], 0.0);
        continue;
      }
      FieldSet p = f, m = f;
      p.values()[q] += 1e-5;
      m.values()[q] -= 1e-5;
      const double fd = (energy_rescaled(p, eps, b).total_I - energy_rescaled(m, eps, b).total_I) / 2e-5;
      worst = std::max(worst, std::abs(fd - an.values()[q]));
    }
    EXPECT_LE(worst / scale, 1e-6);
  }
}

TEST(Physical, FlatSheetHasZeroEnergy) {
  PhysicalFields p;
  p.sigma = 0.01;
  p.L = 2.0;
  p.y_max = 3.0;
  p.n_x = 9;
  p.n_y = 7;
  for (std::size_t j = 0; j < p.n_y; ++j)
    for (std::size_t i = 0; i < p.n_x; ++i) {
      p.u.push_back(p.x(i));
      p.v.push_back(p.y(j));
      p.w.push_back(0.0);
    }
  p.slope.assign(p.n_x, 0.0);
  EXPECT_NEAR(energy_unscaled(p), 0.0, 1e-28);
}

TEST(Physical, BendingQuadruplesWithSigma) {
  std::mt19937_64 rng(8);
  const GridSpec g(9, 11, 4.0);
  const auto b = zero_boundary(g, 0.2);
  const auto f = apply_boundary_conditions(random_fields(g, rng, 0.3), b);
  auto p = map_to_physical(f, b, rescale_params(0.02, 1.0, 0.2, 0.0));
  auto bend_only = p;
  const double full = energy_unscaled(p);
  p.sigma *= 2.0;
  const double doubled = energy_unscaled(p);
  // membrane part is sigma-independent for fixed (u, v, w)
  bend_only.sigma = 1e-300;
  const double membrane = energy_unscaled(bend_only);
  EXPECT_NEAR(doubled - membrane, 4.0 * (full - membrane), 1e-10 * doubled);
  EXPECT_THROW(
      [&] {
        auto q = p;
        q.sigma = 0.0;
        energy_unscaled(q);
      }(),
      DomainError);
}

TEST(Physical, MatchesRescaledEnergy) {
  std::mt19937_64 rng(9);
  for (int k = 0; k < 10; ++k) {
    const GridSpec g(17, 21, 6.0);
    const double alpha = 0.1 + 0.03 * k;
    const auto params = rescale_params(0.01 + 0.02 * k, 0.5 + 0.2 * k, alpha, 0.0);
    auto [f, b] = random_admissible(g, alpha, 0.0, rng, 0.05);
    const double I = energy_rescaled(f, params.epsilon, b).total_I;
    const double phys = energy_unscaled(map_to_physical(f, b, params));
    EXPECT_NEAR(phys, unscale_energy(I, params), 1e-10 * phys);
  }
}
