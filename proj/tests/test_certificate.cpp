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

FieldSet clamped_fill(const GridSpec& g, double (*w)(double, double)) {
  FieldSet f(g);
  f.fill(Component::W, w);
  for (std::size_t j = 0; j < g.n_y(); ++j) f.w(0, j) = f.w(g.n_x() - 1, j) = 0.0;
  return f;
}

}  // namespace

TEST(Profiles, ZeroField) {
  const GridSpec g(9, 9, 4.0);
  const FieldSet f(g);
  const std::vector<double> slope(9, 0.0);
  for (double r : rho_profile(g, f.W(), slope)) EXPECT_TRUE(std::isinf(r));
  for (double t : tau_profile(g, f.W())) EXPECT_EQ(t, 0.0);
}

TEST(Profiles, RhoOfExpFixture) {
  double prev = 1e300;
  for (std::size_t n : {33u, 65u, 129u}) {
    const auto fx = exp_fixture(n, 8 * (n - 1) + 1, 16.0);
    const auto& g = fx.fields.grid();
    const auto rho = rho_profile(g, fx.fields.W(), fx.boundary.slope);
    double worst = 0.0;
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const double X = g.x(i);
      if (std::abs(X) > 0.75) continue;
      const double exact = 2.0 / ((1.0 - X * X) * (1.0 - X * X));
      worst = std::max(worst, std::abs(rho[i] / exact - 1.0));
    }
    EXPECT_LT(worst, prev);
    prev = worst;
  }
  EXPECT_LT(prev, 1e-3);
}

TEST(Profiles, RhoOfRampIsColumnIndependent) {
  // W = alpha Y e^{-Y}: int W_YY^2 = alpha^2 int (Y - 2)^2 e^{-2Y} = 5 alpha^2 / 4
  const double alpha = 0.2;
  const GridSpec g(17, 2049, 24.0);
  FieldSet f(g);
  f.fill(Component::W, [alpha](double, double Y) { return alpha * Y * std::exp(-Y); });
  const std::vector<double> slope(g.n_x(), alpha);
  const auto rho = rho_profile(g, f.W(), slope);
  for (std::size_t i = 1; i + 1 < g.n_x(); ++i) {
    EXPECT_TRUE(std::isfinite(rho[i]));
    EXPECT_DOUBLE_EQ(rho[i], rho[1]);
    EXPECT_NEAR(rho[i], 1.0 / (1.25 * alpha * alpha), 1e-3 * rho[i]);
  }
}

TEST(Profiles, TauOfExpFixture) {
  const auto fx = exp_fixture(513, 129, 8.0);
  const auto& g = fx.fields.grid();
  const auto tau = tau_profile(g, fx.fields.W());
  for (std::size_t j = 0; j < g.n_y(); j += 16)
    EXPECT_NEAR(tau[j], 8.0 / 3.0 * std::exp(-2.0 * g.y(j)), 1e-4);
}

TEST(Poincare, RequiresClampedField) {
  const GridSpec g(9, 9, 4.0);
  FieldSet f(g);
  f.fill(Component::W, [](double, double Y) { return std::exp(-Y); });
  const auto tau = tau_profile(g, f.W());
  for (double t : tau) EXPECT_EQ(t, 0.0);
  EXPECT_THROW(poincare_check(g, f.W(), 0.0), PreconditionError);
}

TEST(Profiles, EnergiesFromProfiles) {
  std::mt19937_64 rng(21);
  const GridSpec g(33, 65, 8.0);
  for (int k = 0; k < 10; ++k) {
    auto [f, b] = random_admissible(g, 0.2, 0.0, rng, 0.05);
    const auto c = certify(f, b, params_from_dimensionless(0.1, 0.0, 0.2));
    double eb = 0.0, es = 0.0;
    for (std::size_t i = 0; i < g.n_x(); ++i)
      if (std::isfinite(c.rho_profile[i])) eb += g.weight_x(i) / c.rho_profile[i];
    for (std::size_t j = 0; j < g.n_y(); ++j) es += g.weight_y(j) * 0.5 * c.tau_profile[j] * c.tau_profile[j];
    EXPECT_NEAR(eb, c.E_b, 1e-12 * c.E_b);
    EXPECT_NEAR(es, c.E_s, 1e-12 * c.E_s);
    EXPECT_GE(c.mu, 0.0);
    EXPECT_GE(c.kappa_mu, 0.0);
    EXPECT_LE(c.kappa_mu, 1.0 / 105.0 + 1e-15);
  }
}

TEST(Poincare, ZeroField) {
  const GridSpec g(9, 9, 4.0);
  const auto r = poincare_check(g, FieldSet(g).W(), 0.0);
  EXPECT_EQ(r.min_margin, 0.0);
  EXPECT_TRUE(r.pass);
}

TEST(Poincare, EigenfunctionMarginTendsToZeroFromAbove) {
  double prev = 1e300;
  for (std::size_t n : {9u, 17u, 33u, 65u, 129u}) {
    const GridSpec g(n, 9, 4.0);
    const auto f = clamped_fill(g, [](double X, double Y) { return std::cos(kPi * X / 2.0) * std::exp(-Y); });
    const auto r = poincare_check(g, f.W(), 0.0);
    const auto tau = tau_profile(g, f.W());
    const double rel = (tau[0] - kPi * kPi / 4.0 * interpolant_norm_profile(g, f.W())[0]) / tau[0];
    EXPECT_GE(rel, 0.0);
    EXPECT_LT(rel, prev);
    EXPECT_TRUE(r.pass);
    prev = rel;
  }
  EXPECT_LT(prev, 1e-4);
}

TEST(Poincare, QuadraticProfileStrictlyPositive) {
  // tau = 8/3, (pi^2/4)(16/15) = 2.63... per unit e^{-2Y}
  const GridSpec g(65, 9, 4.0);
  const auto f = clamped_fill(g, [](double X, double Y) { return (1.0 - X * X) * std::exp(-Y); });
  const auto tau = tau_profile(g, f.W());
  const auto m = interpolant_norm_profile(g, f.W());
  for (std::size_t j = 0; j + 1 < g.n_y(); ++j) {
    const double margin = tau[j] - kPi * kPi / 4.0 * m[j];
    EXPECT_NEAR(margin / std::exp(-2.0 * g.y(j)), 8.0 / 3.0 - kPi * kPi * 4.0 / 15.0, 1e-3);
    EXPECT_GT(margin, 0.0);
  }
}

TEST(Lemma1, TrivialCase) {
  const GridSpec g(9, 9, 4.0);
  const auto b = zero_boundary(g, 0.0);
  const auto f = apply_boundary_conditions(FieldSet(g), b);
  const auto r = lemma1_check(f, b, 0.0, 0.0);
  EXPECT_EQ(r.min_margin, 0.0);
  EXPECT_TRUE(r.pass);
  const auto l = local_bound_check(f, b, 0.0, 0.0);
  EXPECT_TRUE(l.pass);
  EXPECT_EQ(l.checked, 0u);  // every rho is infinite
}

TEST(Lemma1, RejectsInadmissible) {
  const GridSpec g(9, 9, 4.0);
  const auto b = zero_boundary(g, 0.2);
  auto f = apply_boundary_conditions(FieldSet(g), b);
  f.w(0, 3) = 0.1;
  EXPECT_THROW(lemma1_check(f, b, 0.0, 0.0), PreconditionError);
  EXPECT_THROW(local_bound_check(f, b, 0.0, 0.0), PreconditionError);

  const auto bump = quadratic_bump(g, 0.2, 1.0);
  const auto fb = apply_boundary_conditions(FieldSet(g), bump);
  EXPECT_THROW(lemma1_check(fb, bump, 0.5 * bump.A_measured(), 0.0), PreconditionError);

  auto vary = zero_boundary(g, 0.2);
  vary.slope[3] = 0.1;
  EXPECT_THROW(lemma1_check(apply_boundary_conditions(FieldSet(g), vary), vary, 0.0, 0.0), PreconditionError);
}

// The inequality suite on random admissible fields, rough ones included.
TEST(Properties, RandomAdmissibleFieldsPassEveryInequality) {
  std::mt19937_64 rng(22);
  for (auto [nx, ny, ym] : {std::tuple{9u, 9u, 4.0}, std::tuple{17u, 33u, 8.0}, std::tuple{33u, 65u, 12.0}}) {
    const GridSpec g(nx, ny, ym);
    const double tol = DiscreteTolerance{}.value(g);
    for (int k = 0; k < 40; ++k) {
      const double alpha = 0.05 + 0.35 * (k % 8) / 7.0;
      const double A = (k % 3) * 0.5 * size_bound_rescaled(alpha);
      auto [f, b] = random_admissible(g, alpha, A, rng, 0.15 * (k % 4));
      const auto red = reduced_energy(f, b);
      EXPECT_TRUE(lemma1_check(f, b, A, tol).pass);
      EXPECT_TRUE(local_bound_check(f, b, A, tol).pass);
      EXPECT_TRUE(poincare_check(g, f.W(), tol).pass);
      const auto l2 = lemma2_check(red.E_b, red.E_s, alpha, A, tol);
      EXPECT_TRUE(l2.ok());
      if (A == 0.0) {
        EXPECT_EQ(l2.status, Lemma2Status::pass);
      }
      const auto c = certify(f, b, params_from_dimensionless(0.1 + 0.1 * (k % 5), A, alpha));
      EXPECT_TRUE(c.pass);
      EXPECT_TRUE(c.size_condition_ok);
      EXPECT_TRUE(c.jensen_pass);
      EXPECT_GE(c.jensen_margin, 0.0);
    }
  }
}

TEST(Lemma2, HypothesisNotMet) {
  const auto r = lemma2_check(0.1, 0.01, 0.2, 1.0, 0.0);
  EXPECT_EQ(r.status, Lemma2Status::hypothesis_not_met);
  EXPECT_TRUE(r.ok());
  EXPECT_NEAR(r.mu, std::pow(4.0 * 0.1 * 1.0 / 0.008, 2), 1e-9);
}

TEST(Lemma2, Degenerate) {
  const auto r = lemma2_check(0.0, 0.0, 0.2, 0.0, 0.0);
  EXPECT_EQ(r.status, Lemma2Status::degenerate);
  EXPECT_TRUE(r.ok());
}

TEST(Lemma2, PassAndFail) {
  const double alpha = 0.2, Eb = std::pow(alpha, 7.0 / 3.0) / 3.0;
  const double bound = kLemma2Coefficient * std::pow(alpha, 14) / std::pow(Eb, 5);
  EXPECT_EQ(lemma2_check(Eb, 1.01 * bound, alpha, 0.0, 0.0).status, Lemma2Status::pass);
  EXPECT_EQ(lemma2_check(Eb, 0.99 * bound, alpha, 0.0, 0.0).status, Lemma2Status::fail);
  EXPECT_NEAR(lemma2_check(Eb, bound, alpha, 0.0, 0.0).margin, 0.0, 1e-15);
  EXPECT_THROW(lemma2_check(-1.0, 0.0, alpha, 0.0, 0.0), DomainError);
}

TEST(Certify, TrivialZeroCase) {
  const GridSpec g(9, 9, 4.0);
  const auto b = zero_boundary(g, 0.0);
  const auto f = apply_boundary_conditions(FieldSet(g), b);
  const auto c = certify(f, b, params_from_dimensionless(1.0, 0.0, 0.0));
  EXPECT_TRUE(c.pass);
  EXPECT_EQ(c.total_I, 0.0);
  EXPECT_EQ(c.lemma1.min_margin, 0.0);
  EXPECT_EQ(c.poincare.min_margin, 0.0);
  EXPECT_EQ(c.jensen_margin, 0.0);
  EXPECT_EQ(c.theorem_margin, 0.0);
  EXPECT_EQ(c.mu, 0.0);
  EXPECT_EQ(c.lemma2.status, Lemma2Status::degenerate);
  EXPECT_TRUE(std::isinf(c.Y_tilde));
}

TEST(Certify, Preconditions) {
  const GridSpec g(9, 9, 4.0);
  const auto b = zero_boundary(g, 0.2);
  auto f = apply_boundary_conditions(FieldSet(g), b);
  EXPECT_THROW(certify(f, b, params_from_dimensionless(1.0, 0.0, 0.1)), PreconditionError);
  f.u(0, 4) = 1e-6;
  EXPECT_THROW(certify(f, b, params_from_dimensionless(1.0, 0.0, 0.2)), PreconditionError);
}

TEST(Certify, TheoremSkippedWhenSizeConditionFails) {
  const GridSpec g(9, 9, 4.0);
  const auto b = quadratic_bump(g, 0.2, 3.0);
  const auto f = apply_boundary_conditions(FieldSet(g), b);
  const auto c = certify(f, b, params_from_dimensionless(1.0, b.A_measured(), 0.2));
  EXPECT_FALSE(c.size_condition_ok);
  EXPECT_TRUE(c.theorem_pass);
}

TEST(Tolerance, SecondOrderInSpacing) {
  const GridSpec g(33, 65, 16.0);
  EXPECT_DOUBLE_EQ(DiscreteTolerance{}.value(g), kTolDiscConstant * (g.h_x() * g.h_x() + g.h_y() * g.h_y()));
}
