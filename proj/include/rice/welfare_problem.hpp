#pragma once

// Welfare optimal-control problems over a window of steps, with exact
// discrete adjoint gradients through the dynamics.

#include <span>
#include <vector>

#include "rice/calibration.hpp"
#include "rice/model.hpp"
#include "rice/solver.hpp"

namespace rice {

// Sum_i weights[i] * J_i over the steps covered by `profile`, starting from x0
// at absolute step start_step. Weights are taken as given (no normalization).
// If grad is non-empty it receives d/d(controls) in DecisionVector layout:
// region-major, time-minor, [s, mu].
double welfare_and_gradient(const RiceState& x0, const ControlProfile& profile,
                            const ModelParams& model, std::span<const double> weights,
                            int start_step, std::span<double> grad);

// Gradient of weighted welfare over the whole profile from step 0.
std::vector<double> gradient_adjoint(const RiceState& x0, const ControlProfile& profile,
                                     const ModelParams& model, std::span<const double> weights);

// Flattening between profiles and decision vectors (all regions).
std::vector<double> flatten(const ControlProfile& profile);
ControlProfile unflatten(std::span<const double> values, std::size_t regions, std::size_t steps);

struct DecisionVector {
  std::vector<double> values, lower, upper;
};
DecisionVector make_decision_vector(const ControlProfile& profile, const ControlBounds& bounds);

// Weighted welfare over a window as a function of the free regions' controls;
// every other region plays `base`.
class WindowProblem {
 public:
  WindowProblem(const ModelParams& model, RiceState x0, int start_step, std::vector<double> weights,
                ControlProfile base, std::vector<std::size_t> free_regions);

  std::size_t size() const { return 2 * free_.size() * base_.steps(); }
  std::size_t steps() const { return base_.steps(); }

  std::vector<double> pack(const ControlProfile& profile) const;
  ControlProfile unpack(std::span<const double> x) const;
  void bounds(const ControlBounds& b, std::vector<double>& lower, std::vector<double>& upper) const;

  double value(std::span<const double> x) const;
  double value_and_gradient(std::span<const double> x, std::span<double> grad) const;
  Objective objective() const;

  // Diagonal variable scaling: steps whose weighted utility is small (heavily
  // discounted) get proportionally larger scale, 1/sqrt of the step's share
  // relative to the first step, measured at `profile`.
  std::vector<double> period_scale(const ControlProfile& profile) const;

 private:
  const ModelParams& model_;
  RiceState x0_;
  int start_;
  std::vector<double> weights_;
  ControlProfile base_;
  std::vector<std::size_t> free_;
};

struct WindowSolution {
  ControlProfile profile;  // all regions over the window
  SolveReport report;
};

// Maximizes the window problem from `init` (all regions; only free regions'
// entries are used as the start), with the period scaling applied unless
// opts already carries a variable scale.
WindowSolution solve_window(const WindowProblem& problem, const ControlBounds& bounds,
                            const ControlProfile& init, SolveOptions opts);

}  // namespace rice
