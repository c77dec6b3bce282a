// rice_game: run the RICE dynamic-game solution concepts from a scenario file
// (or the embedded default) and write CSV/JSON results plus a run manifest.

#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rice/calibration.hpp"
#include "rice/cooperative.hpp"
#include "rice/errors.hpp"
#include "rice/noncooperative.hpp"
#include "rice/parallel.hpp"
#include "rice/report.hpp"
#include "rice/scenario_io.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace rice;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitModel = 2;
constexpr int kExitUsage = 64;

struct Settings {
  std::string scenario_path;
  std::optional<int> horizon;
  int t_rh = 20;
  int t_sim = 120;
  int grid = 21;
  int episodes = 10;
  std::uint64_t seed = 0;
  unsigned threads = default_thread_count();
  std::string out = "rice_out";
  std::string warm_start = "chain";
  int multistart = 4;
  double saving = kNegishiReferenceSaving;
  double mu = 0.0;
  std::vector<int> scc_steps{0, 4, 10, 20};
  bool certify = true;
};

struct Run {
  Settings cfg;
  Scenario scenario;
  std::string source;
  fs::path out;
  std::string subcommand;

  SolveOptions solve_options() const {
    SolveOptions o;
    o.seed = cfg.seed;
    o.threads = cfg.threads;
    o.multistart = cfg.multistart;
    return o;
  }

  void write(const std::string& name, std::string_view text) const { write_text(out / name, text); }

  void finish(const json& summary, std::vector<std::pair<std::string, std::string>> extra) const {
    write("summary.json", summary.dump(2) + "\n");
    RunManifest m;
    m.subcommand = subcommand;
    m.scenario_source = source;
    m.scenario_sha256 = sha256_hex(serialize_scenario(scenario));
    m.options = {{"horizon", std::to_string(scenario.horizon)},
                 {"seed", std::to_string(cfg.seed)},
                 {"threads", std::to_string(cfg.threads)},
                 {"multistart", std::to_string(cfg.multistart)},
                 {"out", out.string()}};
    m.options.insert(m.options.end(), extra.begin(), extra.end());
    write("manifest.json", m.to_json());
  }
};

json solver_json(const SolveReport& r) {
  return {{"objective", r.objective},
          {"iterations", r.iterations},
          {"termination", std::string(to_string(r.reason))},
          {"start_index", r.start_index}};
}

json state_json(const RiceState& x) {
  return {{"t_at_degc", x.t_at}, {"t_lo_degc", x.t_lo}, {"m_at_gtc", x.m_at},
          {"m_up_gtc", x.m_up}, {"m_lo_gtc", x.m_lo}, {"capital_trillion_usd", x.capital}};
}

json welfare_json(const Scenario& s, const Trajectory& traj) {
  const auto j = regional_welfares(traj, s.model);
  json regions = json::object();
  for (std::size_t i = 0; i < j.size(); ++i) regions[s.region_names[i]] = j[i];
  double weighted = 0;
  for (std::size_t i = 0; i < j.size(); ++i) weighted += s.weights[i] * j[i];
  return {{"regional_utils", regions}, {"weighted_utils", weighted}};
}

json trajectory_summary(const Scenario& s, const Trajectory& traj) {
  json j = welfare_json(s, traj);
  j["terminal_state"] = state_json(traj.states.back());
  j["terminal_year"] = year_of_step(traj.start_step + static_cast<int>(traj.size()));
  j["consumption_floor_hit"] = traj.any_consumption_floored();
  const auto h = static_cast<std::size_t>(s.horizon);
  if (traj.start_step == 0 && traj.states.size() > h) {
    j["horizon_year"] = year_of_step(s.horizon);
    j["t_at_horizon_degc"] = traj.states[h].t_at;
  }
  return j;
}

int cmd_validate(Run& run) {
  const auto violations = validate_scenario(run.scenario);
  for (const auto& v : violations) std::cout << v << "\n";
  if (violations.empty()) std::cout << "scenario valid\n";
  run.finish({{"command", "validate"}, {"violations", violations}}, {});
  return violations.empty() ? kExitOk : kExitValidation;
}

int cmd_simulate(Run& run) {
  const auto profile = constant_profile(run.scenario, run.cfg.saving, run.cfg.mu);
  const auto traj = simulate(run.scenario.x0, profile, run.scenario.model);
  run.write("trajectory.csv", trajectory_csv(run.scenario, traj, profile));
  json s = {{"command", "simulate"}};
  s.update(trajectory_summary(run.scenario, traj));
  run.finish(s, {{"saving", format_double(run.cfg.saving)}, {"mu", format_double(run.cfg.mu)}});
  return kExitOk;
}

int cmd_swm(Run& run) {
  const auto sol = solve_swm(run.scenario, run.solve_options());
  run.write("trajectory.csv", trajectory_csv(run.scenario, sol.trajectory, sol.profile));
  run.write("solver_log.csv", solver_log_csv(sol.report));
  json s = {{"command", "swm"}, {"solver", solver_json(sol.report)}};
  s.update(trajectory_summary(run.scenario, sol.trajectory));
  run.finish(s, {});
  return kExitOk;
}

int cmd_pareto(Run& run) {
  const auto grid = default_pareto_grid(run.cfg.grid);
  const auto warm = run.cfg.warm_start == "cold" ? WarmStart::cold : WarmStart::chain;
  const auto frontier = pareto_frontier(run.scenario, grid, run.solve_options(), warm);
  run.write("frontier.csv", frontier_csv(frontier));
  json dominated = json::array();
  for (const auto& d : frontier.dominated)
    dominated.push_back({{"dominating_p", frontier.points[d.dominating].p},
                         {"dominated_p", frontier.points[d.dominated].p}});
  json s = {{"command", "pareto"},
            {"points", frontier.points.size()},
            {"failures", frontier.failures},
            {"audit_tolerance", frontier.audit_tolerance},
            {"dominated_pairs", dominated}};
  run.finish(s, {{"grid", std::to_string(run.cfg.grid)}, {"warm_start", run.cfg.warm_start}});
  return frontier.failures.empty() ? kExitOk : kExitModel;
}

int cmd_mpc(Run& run) {
  const auto res = mpc_rice(run.scenario, {run.cfg.t_sim, run.cfg.t_rh}, run.solve_options());
  run.write("trajectory.csv", trajectory_csv(run.scenario, res.trajectory, res.profile));
  json s = {{"command", "mpc"}, {"window_objectives", res.window_objectives}};
  s.update(trajectory_summary(run.scenario, res.trajectory));
  run.finish(s, {{"t_sim", std::to_string(run.cfg.t_sim)}, {"t_rh", std::to_string(run.cfg.t_rh)}});
  return kExitOk;
}

int cmd_rba(Run& run) {
  RbaOptions rba;
  rba.episodes = run.cfg.episodes;
  const auto opts = run.solve_options();
  const auto res = rba_dg(run.scenario, rba, opts);
  const auto traj = simulate(run.scenario.x0, res.profile, run.scenario.model);
  run.write("trajectory.csv", trajectory_csv(run.scenario, traj, res.profile));
  run.write("cooperative_trajectory.csv",
            trajectory_csv(run.scenario, res.cooperative.trajectory, res.cooperative.profile));
  run.write("episodes.csv", episodes_csv(run.scenario, res.log));
  json s = {{"command", "rba"},
            {"episodes_run", res.log.episodes.size()},
            {"stopped_early", res.log.stopped_early},
            {"final_distance_inf", res.log.episodes.back().distance_inf}};
  s.update(trajectory_summary(run.scenario, traj));
  if (run.cfg.certify) {
    const auto cert = verify_epsilon_ne(run.scenario, res.profile, opts);
    run.write("certificate.csv", certificate_csv(run.scenario, cert));
    s["epsilon"] = cert.epsilon;
  }
  run.finish(s, {{"episodes", std::to_string(run.cfg.episodes)},
                 {"certify", run.cfg.certify ? "true" : "false"}});
  return kExitOk;
}

int cmd_rhfa(Run& run) {
  const auto res = rhfa_dg(run.scenario, run.cfg.t_sim, run.cfg.t_rh, run.solve_options());
  run.write("trajectory.csv", trajectory_csv(run.scenario, res.trajectory, res.profile));
  json s = {{"command", "rhfa"}};
  s.update(trajectory_summary(run.scenario, res.trajectory));
  run.finish(s, {{"t_sim", std::to_string(run.cfg.t_sim)}, {"t_rh", std::to_string(run.cfg.t_rh)}});
  return kExitOk;
}

int cmd_scc(Run& run) {
  for (int t : run.cfg.scc_steps)
    if (t < 0 || t > run.scenario.horizon)
      throw DomainError("scc step " + std::to_string(t) + " outside the horizon");
  const auto sol = solve_swm(run.scenario, run.solve_options());
  const auto rows = scc_table(run.scenario, sol.profile, run.cfg.scc_steps);
  run.write("scc.csv", scc_csv(rows));
  std::string steps;
  for (int t : run.cfg.scc_steps) steps += (steps.empty() ? "" : ",") + std::to_string(t);
  run.finish({{"command", "scc"}, {"profile", "swm"}, {"solver", solver_json(sol.report)}},
             {{"scc_steps", steps}, {"pulse_gtco2_per_year", format_double(kDefaultSccPulse)}});
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Solve the RICE climate-economy model as a 12-region dynamic game."};
  app.require_subcommand(1);
  Settings cfg;

  app.add_option("--scenario", cfg.scenario_path, "Scenario JSON file (default: embedded)");
  app.add_option("--horizon", cfg.horizon, "Override the scenario horizon (steps)")->check(CLI::NonNegativeNumber);
  app.add_option("--t-rh", cfg.t_rh, "Prediction horizon for mpc/rhfa (steps)")->check(CLI::PositiveNumber);
  app.add_option("--t-sim", cfg.t_sim, "Simulation horizon for mpc/rhfa (steps)")->check(CLI::PositiveNumber);
  app.add_option("--grid", cfg.grid, "Pareto grid points")->check(CLI::PositiveNumber);
  app.add_option("--episodes", cfg.episodes, "Best-response episodes for rba")->check(CLI::PositiveNumber);
  app.add_option("--seed", cfg.seed, "Seed for multistart perturbations");
  app.add_option("--threads", cfg.threads, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--out", cfg.out, "Output directory (RICE_GAME_OUT overrides)");
  app.add_option("--multistart", cfg.multistart, "Solver starts per problem")->check(CLI::PositiveNumber);
  app.add_option("--warm-start", cfg.warm_start, "Pareto warm starts")->check(CLI::IsMember({"chain", "cold"}));
  app.add_option("--saving", cfg.saving, "Saving rate for simulate")->check(CLI::Range(0.0, 1.0));
  app.add_option("--mu", cfg.mu, "Emission-reduction rate for simulate")->check(CLI::Range(0.0, 1.0));
  app.add_option("--scc-steps", cfg.scc_steps, "Steps for the SCC table")->delimiter(',');
  app.add_flag("!--no-certify", cfg.certify, "Skip the epsilon-NE certificate after rba");

  using Handler = std::function<int(Run&)>;
  const std::vector<std::tuple<std::string, std::string, Handler>> commands = {
      {"validate", "Check scenario invariants", cmd_validate},
      {"simulate", "Simulate a constant control profile", cmd_simulate},
      {"swm", "Global social welfare maximization", cmd_swm},
      {"pareto", "Developed/developing Pareto frontier", cmd_pareto},
      {"mpc", "Receding-horizon welfare maximization", cmd_mpc},
      {"rba", "Recursive best responses toward open-loop Nash", cmd_rba},
      {"rhfa", "Receding-horizon feedback play", cmd_rhfa},
      {"scc", "Regional social cost of CO2 under the cooperative solution", cmd_scc}};
  for (const auto& [name, desc, _] : commands) app.add_subcommand(name, desc)->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return e.get_exit_code() == 0 ? code : kExitUsage;
  }

  Run run;
  run.cfg = cfg;
  run.subcommand = app.get_subcommands().front()->get_name();
  const char* env_out = std::getenv("RICE_GAME_OUT");
  run.out = env_out && *env_out ? fs::path(env_out) : fs::path(cfg.out);

  try {
    if (cfg.scenario_path.empty()) {
      run.scenario = parse_scenario(embedded_default_scenario());
      run.source = "embedded-default";
    } else {
      run.scenario = load_scenario(cfg.scenario_path);
      run.source = cfg.scenario_path;
    }
    if (cfg.horizon) run.scenario.horizon = *cfg.horizon;
    if (run.subcommand != "validate") {
      if (auto v = validate_scenario(run.scenario); !v.empty()) throw ValidationError(std::move(v));
    }
    for (const auto& [name, desc, handler] : commands)
      if (name == run.subcommand) return handler(run);
  } catch (const ValidationError& e) {
    std::cerr << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitModel;
  }
  return kExitModel;
}
