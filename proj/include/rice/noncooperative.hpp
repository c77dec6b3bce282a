#pragma once

#include <optional>
#include <vector>

#include "rice/calibration.hpp"
#include "rice/cooperative.hpp"
#include "rice/solver.hpp"

namespace rice {

struct BestResponse {
  ControlProfile profile;  // full profile with region i replaced
  double welfare = 0;      // J_i at the response
  SolveReport report;
};

// Maximizes J_i over region i's controls; the other regions play `fixed`.
// Region i's slice of `init` (default: of `fixed`) is the starting point.
BestResponse best_response(const Scenario& scenario, std::size_t region,
                           const ControlProfile& fixed, const SolveOptions& opts,
                           std::optional<ControlProfile> init = std::nullopt);

struct Episode {
  ControlProfile profile;        // U^(k+1)
  std::vector<double> welfares;  // J_i at U^(k+1)
  double distance_inf = 0;       // ||U^(k+1) - U^(k)||_inf
  double distance_2 = 0;
};

struct EpisodeLog {
  ControlProfile initial;  // U^(0), the cooperative solution
  std::vector<Episode> episodes;
  bool stopped_early = false;  // distance fell below the early-stop threshold
};

enum class UpdateRule { jacobi, gauss_seidel };

struct RbaOptions {
  int episodes = 10;
  double early_stop = 1e-6;
  UpdateRule rule = UpdateRule::jacobi;
};

struct RbaResult {
  ControlProfile profile;  // U^(N)
  EpisodeLog log;
  CooperativeSolution cooperative;
};

// Recursive best responses from the cooperative solution. Under the Jacobi
// rule the regions' responses within an episode run on opts.threads workers.
RbaResult rba_dg(const Scenario& scenario, const RbaOptions& rba, const SolveOptions& opts,
                 std::optional<CooperativeSolution> cooperative = std::nullopt);

struct NeCertificate {
  std::vector<double> welfare_candidate;  // J_i at the candidate
  std::vector<double> welfare_deviation;  // J_i after a unilateral best response
  std::vector<double> relative_gain;      // (deviation - candidate) / |candidate|
  double epsilon = 0;                     // max relative gain
};

NeCertificate verify_epsilon_ne(const Scenario& scenario, const ControlProfile& candidate,
                                const SolveOptions& opts);

struct RhfaResult {
  ControlProfile profile;  // played controls, t_sim steps
  Trajectory trajectory;
};

// Receding-horizon feedback play. Step 0 plays `first` (by default the
// cooperative solution's first controls). Knowing x(t) and the controls
// played at t, each region plans steps t+1 .. t+t_rh against the others
// holding their step-t controls, and plays its first planned control.
RhfaResult rhfa_dg(const Scenario& scenario, int t_sim, int t_rh, const SolveOptions& opts,
                   std::optional<std::vector<RegionControl>> first = std::nullopt);

}  // namespace rice
