#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "rice/solver.hpp"

namespace {

using namespace rice;

// f(x) = -sum_k c_k (x_k - a_k)^2, maximized at a (clipped to the box).
struct Quadratic {
  std::vector<double> a, c;
  double operator()(std::span<const double> x, std::span<double> g) const {
    double f = 0;
    for (std::size_t k = 0; k < x.size(); ++k) {
      const double d = x[k] - a[k];
      f -= c[k] * d * d;
      if (!g.empty()) g[k] = -2 * c[k] * d;
    }
    return f - 1.0;  // keeps f(init) away from zero for the default scaling
  }
};

SolveOptions opts1() {
  SolveOptions o;
  o.multistart = 1;
  o.gradient_tolerance = 1e-10;
  return o;
}

TEST(Solver, InteriorQuadratic) {
  const Quadratic q{{0.3, -0.7, 1.2}, {1, 10, 100}};
  const std::vector<double> lo(3, -5), hi(3, 5), x0{0, 0, 0};
  const SolveReport r = maximize(q, lo, hi, x0, opts1());
  for (int k = 0; k < 3; ++k) EXPECT_NEAR(r.x[k], q.a[k], 1e-6);
  EXPECT_NEAR(r.objective, -1.0, 1e-10);
}

TEST(Solver, ProjectsOntoActiveBounds) {
  const Quadratic q{{2.0, -3.0, 0.5}, {1, 1, 1}};
  const std::vector<double> lo{0, -1, 0}, hi{1, 1, 1}, x0{0.5, 0.5, 0.5};
  const SolveReport r = maximize(q, lo, hi, x0, opts1());
  EXPECT_EQ(r.x[0], 1.0);
  EXPECT_EQ(r.x[1], -1.0);
  EXPECT_NEAR(r.x[2], 0.5, 1e-8);
}

TEST(Solver, InitOutsideBoxIsProjected) {
  const Quadratic q{{0.2}, {1}};
  const std::vector<double> lo{0}, hi{1}, x0{7};
  const SolveReport r = maximize(q, lo, hi, x0, opts1());
  EXPECT_NEAR(r.x[0], 0.2, 1e-8);
}

TEST(Solver, ObjectiveLogIsMonotone) {
  const Quadratic q{{0.1, 0.9, 0.4, 0.6}, {1, 50, 3, 0.2}};
  const std::vector<double> lo(4, 0), hi(4, 1), x0{1, 0, 1, 0};
  const SolveReport r = maximize(q, lo, hi, x0, opts1());
  ASSERT_GE(r.objective_log.size(), 2u);
  for (std::size_t k = 1; k < r.objective_log.size(); ++k)
    EXPECT_GE(r.objective_log[k], r.objective_log[k - 1]);
  EXPECT_EQ(r.objective_log.back(), r.objective);
}

TEST(Solver, ScalingInvariance) {
  const Quadratic q{{0.25, 0.75}, {1, 4}};
  auto scaled = [&](std::span<const double> x, std::span<double> g) {
    const double f = q(x, g);
    for (double& v : g) v *= 1e6;
    return 1e6 * f;
  };
  const std::vector<double> lo(2, 0), hi(2, 1), x0{0.9, 0.1};
  const SolveReport a = maximize(q, lo, hi, x0, opts1());
  const SolveReport b = maximize(scaled, lo, hi, x0, opts1());
  for (int k = 0; k < 2; ++k) EXPECT_NEAR(a.x[k], b.x[k], 1e-7);
}

TEST(Solver, VariableScaleDoesNotMoveOptimum) {
  const Quadratic q{{0.25, 0.75}, {1, 1e4}};
  SolveOptions o = opts1();
  o.variable_scale = {1.0, 0.01};
  const std::vector<double> lo(2, 0), hi(2, 1), x0{0.9, 0.1};
  const SolveReport r = maximize(q, lo, hi, x0, o);
  EXPECT_NEAR(r.x[0], 0.25, 1e-6);
  EXPECT_NEAR(r.x[1], 0.75, 1e-6);
}

TEST(Solver, NonFiniteInitThrows) {
  auto bad = [](std::span<const double>, std::span<double> g) {
    for (double& v : g) v = 0;
    return std::numeric_limits<double>::quiet_NaN();
  };
  const std::vector<double> lo{0}, hi{1}, x0{0.5};
  EXPECT_THROW(maximize(bad, lo, hi, x0, opts1()), std::invalid_argument);
}

TEST(Solver, MultistartDeterministicAndNoWorse) {
  // Two bumps; the start sits near the lower one.
  auto f = [](std::span<const double> x, std::span<double> g) {
    const double a = std::exp(-50 * (x[0] - 0.2) * (x[0] - 0.2));
    const double b = 2 * std::exp(-50 * (x[0] - 0.8) * (x[0] - 0.8));
    if (!g.empty()) g[0] = -100 * (x[0] - 0.2) * a - 100 * (x[0] - 0.8) * b;
    return 1 + a + b;
  };
  const std::vector<double> lo{0}, hi{1}, x0{0.2};
  SolveOptions o = opts1();
  const SolveReport single = maximize(f, lo, hi, x0, o);
  o.multistart = 4;
  o.seed = 11;
  o.perturbation = 1.0;
  o.threads = 4;
  const SolveReport m1 = maximize(f, lo, hi, x0, o);
  o.threads = 1;
  const SolveReport m2 = maximize(f, lo, hi, x0, o);
  EXPECT_GE(m1.objective, single.objective);
  EXPECT_EQ(m1.x, m2.x);
  EXPECT_EQ(m1.start_index, m2.start_index);
}

TEST(Solver, ReportsTermination) {
  const Quadratic q{{0.5}, {1}};
  const std::vector<double> lo{0}, hi{1}, x0{0.1};
  SolveOptions o = opts1();
  o.max_iterations = 0;
  EXPECT_EQ(maximize(q, lo, hi, x0, o).reason, Termination::max_iterations);
  o.max_iterations = 100;
  const Termination t = maximize(q, lo, hi, x0, o).reason;
  EXPECT_TRUE(t == Termination::gradient || t == Termination::objective_change);
}

TEST(FiniteDifference, ExactOnLinear) {
  auto f = [](std::span<const double> x) { return 3 * x[0] - 2 * x[1] + 0.5; };
  const std::vector<double> x{0.3, 0.4};
  const FdGradient g = gradient_fd(f, x, 1e-4);
  EXPECT_NEAR(g.gradient[0], 3, 1e-9);
  EXPECT_NEAR(g.gradient[1], -2, 1e-9);
}

TEST(FiniteDifference, CentralIsExactOnQuadratic) {
  auto f = [](std::span<const double> x) { return x[0] * x[0] + 5 * x[0] * x[1]; };
  const std::vector<double> x{1.0, 2.0};
  const FdGradient g = gradient_fd(f, x, 1e-3);
  EXPECT_NEAR(g.gradient[0], 2 + 10, 1e-8);
  EXPECT_NEAR(g.gradient[1], 5, 1e-8);
  EXPECT_EQ(g.one_sided, (std::vector<char>{0, 0}));
}

TEST(FiniteDifference, OneSidedAtBounds) {
  auto f = [](std::span<const double> x) { return 2 * x[0]; };
  const std::vector<double> x{0.0}, lo{0.0}, hi{1.0};
  const FdGradient g = gradient_fd(f, x, 1e-4, lo, hi);
  EXPECT_NEAR(g.gradient[0], 2, 1e-9);
  EXPECT_EQ(g.one_sided[0], 1);
}

}  // namespace
