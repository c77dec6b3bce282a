#pragma once

#include <optional>
#include <vector>

#include "rice/calibration.hpp"
#include "rice/solver.hpp"
#include "rice/welfare_problem.hpp"

namespace rice {

inline constexpr RegionControl kCooperativeWarmStart{0.25, 0.1};

struct CooperativeSolution {
  ControlProfile profile;
  SolveReport report;
  Trajectory trajectory;
  std::vector<double> welfares;  // J_i
};

// Maximizes the Negishi-weighted welfare over the full horizon.
CooperativeSolution solve_swm(const Scenario& scenario, const SolveOptions& opts,
                              std::optional<ControlProfile> init = std::nullopt);

struct ParetoPoint {
  double p = 0;
  ControlProfile profile;
  double w_developed = 0;   // sum of J_i over developed regions
  double w_developing = 0;  // sum of J_i over developing regions
  double t_at_final = 0;    // t_at at step horizon (year 2020 + 5 * horizon)
  SolveReport report;
};

// Maximizes p * W_developed + (1 - p) * W_developing.
ParetoPoint solve_pareto_point(const Scenario& scenario, double p, const SolveOptions& opts,
                               std::optional<ControlProfile> init = std::nullopt);

struct DominatedPair {
  std::size_t dominating, dominated;
};

struct ParetoFrontier {
  std::vector<ParetoPoint> points;
  std::vector<std::string> failures;  // one entry per failed grid point
  // Pairs where one point beats another in both cluster welfares by more
  // than `audit_tolerance` relative.
  std::vector<DominatedPair> dominated;
  double audit_tolerance = 0;
};

enum class WarmStart { chain, cold };

// `grid` must be sorted, deduplicated, within [0, 1]. Chained warm starts
// solve the grid in order; cold starts run points concurrently on
// opts.threads workers.
ParetoFrontier pareto_frontier(const Scenario& scenario, const std::vector<double>& grid,
                               const SolveOptions& opts, WarmStart warm = WarmStart::chain,
                               double audit_tolerance = 1e-6);

std::vector<double> default_pareto_grid(int points = 21);

struct MpcConfig {
  int t_sim = 1;  // controls applied
  int t_rh = 1;   // steps per prediction window
};

struct MpcResult {
  ControlProfile profile;  // t_sim applied controls
  Trajectory trajectory;   // closed loop over t_sim steps
  std::vector<double> window_objectives;
};

// Receding-horizon welfare maximization: at step t the window covers steps
// t .. t + t_rh - 1 from the observed state; its first control is applied.
// Windows never shrink, so the exogenous paths must cover t_sim + t_rh steps.
MpcResult mpc_rice(const Scenario& scenario, const MpcConfig& cfg, const SolveOptions& opts);

}  // namespace rice
