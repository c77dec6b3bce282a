#include "rice/cooperative.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <stdexcept>

#include "rice/errors.hpp"
#include "rice/parallel.hpp"

namespace rice {

namespace {

std::vector<std::size_t> all_regions(std::size_t n) {
  std::vector<std::size_t> r(n);
  for (std::size_t i = 0; i < n; ++i) r[i] = i;
  return r;
}

ControlProfile cold_start(const Scenario& s) {
  return ControlProfile(s.region_count(), s.steps(), kCooperativeWarmStart);
}

std::vector<double> cluster_weights(const Scenario& s, double p) {
  std::vector<double> w(s.region_count());
  for (std::size_t i = 0; i < w.size(); ++i)
    w[i] = s.clusters[i] == Cluster::developed ? p : 1.0 - p;
  return w;
}

}  // namespace

CooperativeSolution solve_swm(const Scenario& scenario, const SolveOptions& opts,
                              std::optional<ControlProfile> init) {
  const ControlProfile start = init ? *init : cold_start(scenario);
  WindowProblem problem(scenario.model, scenario.x0, 0, scenario.weights, start,
                        all_regions(scenario.region_count()));
  auto sol = solve_window(problem, scenario.bounds, start, opts);
  CooperativeSolution out;
  out.trajectory = simulate(scenario.x0, sol.profile, scenario.model);
  out.welfares = regional_welfares(out.trajectory, scenario.model);
  out.profile = std::move(sol.profile);
  out.report = std::move(sol.report);
  return out;
}

ParetoPoint solve_pareto_point(const Scenario& scenario, double p, const SolveOptions& opts,
                               std::optional<ControlProfile> init) {
  if (!(p >= 0 && p <= 1)) throw DomainError("solve_pareto_point: p must lie in [0, 1]");
  const ControlProfile start = init ? *init : cold_start(scenario);
  WindowProblem problem(scenario.model, scenario.x0, 0, cluster_weights(scenario, p), start,
                        all_regions(scenario.region_count()));
  auto sol = solve_window(problem, scenario.bounds, start, opts);
  ParetoPoint pt;
  pt.p = p;
  const Trajectory traj = simulate(scenario.x0, sol.profile, scenario.model);
  const auto j = regional_welfares(traj, scenario.model);
  for (std::size_t i = 0; i < j.size(); ++i)
    (scenario.clusters[i] == Cluster::developed ? pt.w_developed : pt.w_developing) += j[i];
  pt.t_at_final = traj.states[static_cast<std::size_t>(scenario.horizon)].t_at;
  pt.profile = std::move(sol.profile);
  pt.report = std::move(sol.report);
  return pt;
}

std::vector<double> default_pareto_grid(int points) {
  if (points < 1) throw DomainError("pareto grid needs at least one point");
  if (points == 1) return {0.5};
  std::vector<double> g(points);
  for (int k = 0; k < points; ++k) g[k] = 0.001 + (0.999 - 0.001) * k / (points - 1);
  return g;
}

ParetoFrontier pareto_frontier(const Scenario& scenario, const std::vector<double>& grid,
                               const SolveOptions& opts, WarmStart warm, double audit_tolerance) {
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (!(grid[k] >= 0 && grid[k] <= 1)) throw DomainError("pareto grid values must lie in [0, 1]");
    if (k > 0 && !(grid[k] > grid[k - 1]))
      throw DomainError("pareto grid must be sorted and deduplicated");
  }
  std::vector<std::optional<ParetoPoint>> solved(grid.size());
  std::vector<std::string> errors(grid.size());
  auto solve_one = [&](std::size_t k, std::optional<ControlProfile> init) {
    try {
      solved[k] = solve_pareto_point(scenario, grid[k], opts, std::move(init));
    } catch (const std::exception& e) {
      errors[k] = fmt::format("p = {}: {}", grid[k], e.what());
    }
  };
  if (warm == WarmStart::chain) {
    std::optional<ControlProfile> prev;
    for (std::size_t k = 0; k < grid.size(); ++k) {
      solve_one(k, prev);
      if (solved[k]) prev = solved[k]->profile;
    }
  } else {
    SolveOptions inner = opts;
    inner.threads = 1;
    parallel_for(grid.size(), opts.threads, [&](std::size_t k) {
      try {
        solved[k] = solve_pareto_point(scenario, grid[k], inner);
      } catch (const std::exception& e) {
        errors[k] = fmt::format("p = {}: {}", grid[k], e.what());
      }
    });
  }

  ParetoFrontier out;
  out.audit_tolerance = audit_tolerance;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (solved[k]) out.points.push_back(std::move(*solved[k]));
    else out.failures.push_back(errors[k]);
  }
  auto beats = [&](double a, double b) { return a - b > audit_tolerance * std::abs(b); };
  for (std::size_t a = 0; a < out.points.size(); ++a)
    for (std::size_t b = 0; b < out.points.size(); ++b) {
      if (a == b) continue;
      const auto& pa = out.points[a];
      const auto& pb = out.points[b];
      if (beats(pa.w_developed, pb.w_developed) && beats(pa.w_developing, pb.w_developing))
        out.dominated.push_back({a, b});
    }
  return out;
}

MpcResult mpc_rice(const Scenario& scenario, const MpcConfig& cfg, const SolveOptions& opts) {
  if (cfg.t_sim < 1 || cfg.t_rh < 1) throw DomainError("mpc: t_sim and t_rh must be at least 1");
  if (static_cast<std::size_t>(cfg.t_sim + cfg.t_rh) > scenario.model.exo.length())
    throw DomainError(fmt::format("mpc: exogenous paths cover {} steps, need t_sim + t_rh = {}",
                                  scenario.model.exo.length(), cfg.t_sim + cfg.t_rh));
  const std::size_t n = scenario.region_count();
  const std::size_t h = static_cast<std::size_t>(cfg.t_rh);
  MpcResult out;
  out.profile = ControlProfile(n, static_cast<std::size_t>(cfg.t_sim));
  out.trajectory.states.push_back(scenario.x0);

  ControlProfile window(n, h, kCooperativeWarmStart);
  for (int t = 0; t < cfg.t_sim; ++t) {
    const RiceState& x = out.trajectory.states.back();
    try {
      WindowProblem problem(scenario.model, x, t, scenario.weights, window, all_regions(n));
      auto sol = solve_window(problem, scenario.bounds, window, opts);
      out.window_objectives.push_back(sol.report.objective);
      window = std::move(sol.profile);
    } catch (const std::exception& e) {
      throw SimulationError(t, std::string("mpc window solve failed: ") + e.what());
    }
    const auto u = window.at_step(0);
    for (std::size_t i = 0; i < n; ++i) out.profile.at(i, t) = u[i];
    auto r = step(t, x, u, scenario.model);
    out.trajectory.states.push_back(std::move(r.next));
    out.trajectory.steps.push_back(std::move(r.diagnostics));

    // Shift the plan by one step; the last step repeats.
    ControlProfile shifted(n, h);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < h; ++k) shifted.at(i, k) = window.at(i, std::min(k + 1, h - 1));
    window = std::move(shifted);
  }
  return out;
}

}  // namespace rice
