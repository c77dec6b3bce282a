#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "oracle.hpp"
#include "rice/errors.hpp"
#include "rice/welfare_problem.hpp"
#include "test_support.hpp"

namespace {

using namespace rice;
using testing_support::default_scenario;
using testing_support::small_scenario;

TEST(WelfareProblem, FlattenRoundTrip) {
  ControlProfile p(3, 4);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t t = 0; t < 4; ++t) p.at(i, t) = {0.1 * i + 0.01 * t, 0.5 - 0.02 * t};
  const auto v = flatten(p);
  ASSERT_EQ(v.size(), 24u);
  EXPECT_EQ(v[(1 * 4 + 2) * 2], p.at(1, 2).s);
  EXPECT_EQ(v[(2 * 4 + 3) * 2 + 1], p.at(2, 3).mu);
  EXPECT_EQ(unflatten(v, 3, 4), p);
  EXPECT_THROW(unflatten(v, 3, 5), DomainError);
}

TEST(WelfareProblem, DecisionVectorBounds) {
  const ControlProfile p(2, 3, {0.3, 0.4});
  const DecisionVector dv = make_decision_vector(p, ControlBounds{});
  ASSERT_EQ(dv.lower.size(), 12u);
  for (std::size_t k = 0; k < 12; k += 2) {
    EXPECT_EQ(dv.lower[k], 0.05);
    EXPECT_EQ(dv.upper[k], 0.95);
    EXPECT_EQ(dv.lower[k + 1], 0.0);
    EXPECT_EQ(dv.upper[k + 1], 1.0);
  }
}

TEST(WelfareProblem, ValueMatchesWeightedWelfare) {
  const Scenario& s = default_scenario();
  const ControlProfile p = constant_profile(s, 0.24, 0.15);
  const double v = welfare_and_gradient(s.x0, p, s.model, s.weights, 0, {});
  const double w = weighted_welfare(simulate(s.x0, p, s.model), s.model, s.weights);
  EXPECT_NEAR(v, w, 1e-12 * std::abs(w));
}

TEST(WelfareProblem, AdjointMatchesExtendedPrecisionDifferences) {
  const Scenario s = small_scenario({0, 5, 8}, 8);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> us(0.1, 0.9), umu(0.05, 0.95);
  ControlProfile p(3, s.steps());
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t t = 0; t < s.steps(); ++t) p.at(i, t) = {us(rng), umu(rng)};
  const auto g = gradient_adjoint(s.x0, p, s.model, s.weights);
  const auto fd = oracle::welfare_gradient_fd(s.x0, flatten(p), s.steps(), s.model, s.weights, 1e-3L);
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (std::abs(fd[k]) <= 1e-8) continue;
    EXPECT_LT(std::abs(g[k] - fd[k]) / std::abs(fd[k]), 1e-5) << "coordinate " << k;
  }
}

TEST(WelfareProblem, MuGradientNonPositiveWithoutDamages) {
  Scenario s = small_scenario({0, 6}, 6);
  for (auto& r : s.model.regions) r.a2 = 0;
  const ControlProfile p(2, s.steps(), {0.25, 0.3});
  const auto g = gradient_adjoint(s.x0, p, s.model, s.weights);
  for (std::size_t k = 1; k < g.size(); k += 2) EXPECT_LE(g[k], 0.0) << k;
}

TEST(WelfareProblem, MuGradientNonPositiveWithoutEmissionsIntensity) {
  Scenario s = small_scenario({0, 6}, 6);
  for (auto& row : s.model.exo.sigma) std::fill(row.begin(), row.end(), 0.0);
  const ControlProfile p(2, s.steps(), {0.25, 0.3});
  const auto g = gradient_adjoint(s.x0, p, s.model, s.weights);
  for (std::size_t k = 1; k < g.size(); k += 2) EXPECT_LE(g[k], 0.0) << k;
}

TEST(WelfareProblem, OtherRegionsFinalSavingHasNoEffect) {
  const Scenario s = small_scenario({0, 6}, 5);
  const ControlProfile p(2, s.steps(), {0.25, 0.3});
  const std::vector<double> only_first{1.0, 0.0};
  const auto g = gradient_adjoint(s.x0, p, s.model, only_first);
  const std::size_t last = s.steps() - 1;
  EXPECT_EQ(g[(1 * s.steps() + last) * 2], 0.0);
  EXPECT_NE(g[(0 * s.steps() + last) * 2], 0.0);
}

TEST(WelfareProblem, WindowGradientMatchesFullGradientSlice) {
  const Scenario s = small_scenario({0, 6, 9}, 5);
  const ControlProfile base(3, s.steps(), {0.22, 0.2});
  const WindowProblem wp(s.model, s.x0, 0, s.weights, base, {2});
  const auto x = wp.pack(base);
  std::vector<double> g(x.size());
  wp.value_and_gradient(x, g);
  const auto full = gradient_adjoint(s.x0, base, s.model, s.weights);
  for (std::size_t k = 0; k < g.size(); ++k) EXPECT_EQ(g[k], full[2 * s.steps() * 2 + k]);
  EXPECT_EQ(wp.unpack(x), base);
}

TEST(WelfareProblem, PeriodScaleStartsAtOneAndGrows) {
  const Scenario s = small_scenario({0, 6}, 30);
  const ControlProfile base(2, s.steps(), {0.25, 0.1});
  const WindowProblem wp(s.model, s.x0, 0, s.weights, base, {0, 1});
  const auto sc = wp.period_scale(base);
  ASSERT_EQ(sc.size(), wp.size());
  EXPECT_EQ(sc[0], 1.0);
  EXPECT_GT(sc[2 * (s.steps() - 1)], 1.0);
}

TEST(WelfareProblem, SolveWindowImprovesObjective) {
  const Scenario s = small_scenario({0, 6}, 6);
  const ControlProfile base(2, s.steps(), {0.25, 0.1});
  const WindowProblem wp(s.model, s.x0, 0, s.weights, base, {0, 1});
  const WindowSolution sol = solve_window(wp, s.bounds, base, testing_support::tight_opts());
  EXPECT_GT(wp.value(wp.pack(sol.profile)), wp.value(wp.pack(base)));
}

}  // namespace
