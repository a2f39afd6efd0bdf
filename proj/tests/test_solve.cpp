#include <gtest/gtest.h>

#include "ridge/ridge.hpp"

using namespace ridge;

namespace {

SolveOptions ladder_options() {
  SolveOptions o;
  o.continuation_ladder = {1.0, 0.3, 0.1, 0.03};
  return o;
}

void expect_solver_contract(const MinimizeResult& r, const BoundaryData& b, double epsilon, const SolveOptions& o) {
  ASSERT_FALSE(r.energy_history.empty());
  for (std::size_t k = 1; k < r.energy_history.size(); ++k)
    EXPECT_LE(r.energy_history[k], r.energy_history[k - 1]);
  EXPECT_TRUE(admissibility_check(r.fields, b, 1e-12).pass);
  EXPECT_EQ(apply_boundary_conditions(r.fields, b), r.fields);
  const auto again = energy_rescaled(r.fields, epsilon, b);
  EXPECT_NEAR(again.total_I, r.breakdown.total_I, 1e-12 * std::max(1.0, r.breakdown.total_I));
  if (r.converged) {
    EXPECT_LE(r.final_gradient_norm, o.gradient_tolerance);
    const auto g = gradient(r.fields, epsilon, b);
    EXPECT_LE(gradient_density_norm(r.fields.grid(), g.values()), o.gradient_tolerance);
  }
}

}  // namespace

TEST(Minimize, ZeroDataGivesZero) {
  const GridSpec g(9, 9, 4.0);
  const auto b = zero_boundary(g, 0.0);
  const auto r = minimize(b, 1.0, g, {});
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.breakdown.total_I, 0.0);
  for (double v : r.fields.values()) EXPECT_EQ(v, 0.0);
}

TEST(Minimize, ContractOnSmallGrid) {
  const GridSpec g(17, 33, default_y_max(0.2));
  const auto b = quadratic_bump(g, 0.2, 0.5);
  const SolveOptions o;
  const auto r = minimize(b, 0.1, g, o);
  EXPECT_TRUE(r.converged);
  expect_solver_contract(r, b, 0.1, o);
}

TEST(Minimize, RejectsBadOptions) {
  const GridSpec g(9, 9, 4.0);
  const auto b = zero_boundary(g, 0.1);
  SolveOptions o;
  o.continuation_ladder = {0.3, 1.0};
  EXPECT_THROW(continuation_minimize(b, 0.1, g, o), ValidationError);
  o = {};
  o.gradient_tolerance = 0.0;
  EXPECT_THROW(minimize(b, 0.1, g, o), ValidationError);
}

TEST(Continuation, SingleRungLadderEqualsPlainMinimize) {
  const GridSpec g(17, 33, 8.0);
  const auto b = zero_boundary(g, 0.1);
  SolveOptions o;
  o.continuation_ladder = {1.0};
  const auto a = continuation_minimize(b, 1.0, g, o);
  const auto p = minimize(b, 1.0, g, {});
  EXPECT_EQ(a.fields, p.fields);
  EXPECT_EQ(a.breakdown.total_I, p.breakdown.total_I);
}

TEST(Continuation, NeverWorseThanRandomStart) {
  const GridSpec g(33, 65, default_y_max(0.2));
  const auto b = zero_boundary(g, 0.2);
  const auto o = ladder_options();
  const auto ladder = continuation_minimize(b, 0.01, g, o);
  expect_solver_contract(ladder, b, 0.01, o);
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    SolveOptions r;
    r.seed = seed;
    r.init_noise = 0.05;
    const auto plain = minimize(b, 0.01, g, r);
    EXPECT_LE(ladder.breakdown.total_I, plain.breakdown.total_I * (1.0 + 1e-9));
  }
}

TEST(Continuation, Deterministic) {
  const GridSpec g(17, 33, 8.0);
  const auto b = quadratic_bump(g, 0.2, 0.5);
  auto o = ladder_options();
  o.seed = 7;
  o.init_noise = 0.01;
  const auto a = continuation_minimize(b, 0.03, g, o);
  const auto c = continuation_minimize(b, 0.03, g, o);
  EXPECT_EQ(a.fields, c.fields);
  EXPECT_EQ(a.energy_history, c.energy_history);
  EXPECT_EQ(a.iterations, c.iterations);
}

TEST(Continuation, MinimizerIsCertified) {
  const GridSpec g(33, 65, default_y_max(0.2));
  const RunConfig defaults;
  for (double fraction : {0.0, defaults.fraction}) {
    const auto b = quadratic_bump(g, 0.2, fraction);
    const auto r = continuation_minimize(b, 0.01, g, ladder_options());
    ASSERT_TRUE(r.converged);
    const auto c = certify(r.fields, b, params_from_dimensionless(0.01, b.A_measured(), 0.2));
    EXPECT_TRUE(c.pass);
    EXPECT_TRUE(c.size_condition_ok);
    EXPECT_LT(c.mu, c.lemma2.mu_star);
    EXPECT_EQ(c.lemma2.status, Lemma2Status::pass);
    EXPECT_GE(c.total_I, theorem_bound(0.2));
  }
}

// Minimizers carry E_b far above alpha^{7/3}/3, so at half the size bound mu
// exceeds mu*; the certificate still passes with the hypothesis reported unmet.
TEST(Continuation, LargeBumpLeavesLemma2HypothesisUnmet) {
  const GridSpec g(33, 65, default_y_max(0.2));
  const auto b = quadratic_bump(g, 0.2, 0.5);
  const auto r = continuation_minimize(b, 0.01, g, ladder_options());
  const auto c = certify(r.fields, b, params_from_dimensionless(0.01, b.A_measured(), 0.2));
  EXPECT_GT(c.E_b, 10.0 * std::pow(0.2, 7.0 / 3.0) / 3.0);
  EXPECT_EQ(c.lemma2.status, Lemma2Status::hypothesis_not_met);
  EXPECT_TRUE(c.pass);
}

TEST(Continuation, FineGridWithinSanityBand) {
  const GridSpec g(129, 257, default_y_max(0.2));
  const auto b = zero_boundary(g, 0.2);
  const auto r = continuation_minimize(b, 0.01, g, ladder_options());
  EXPECT_TRUE(r.converged);
  EXPECT_GE(r.breakdown.total_I, 0.4 * std::pow(0.2, 7.0 / 3.0));
  EXPECT_LE(r.breakdown.total_I, 50.0 * 0.4 * std::pow(0.2, 7.0 / 3.0));
}
