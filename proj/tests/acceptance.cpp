// Acceptance gate: one PASS/FAIL line per criterion. Pass criterion numbers
// as arguments to run a subset; exit status is nonzero if any run criterion
// fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "rice/calibration.hpp"
#include "rice/cooperative.hpp"
#include "rice/model.hpp"
#include "rice/noncooperative.hpp"
#include "rice/parallel.hpp"
#include "rice/report.hpp"
#include "rice/solver.hpp"
#include "rice/welfare_problem.hpp"

#include "oracle.hpp"

namespace {

using namespace rice;

struct Outcome {
  bool pass = false;
  std::string detail;
};

SolveOptions default_opts() {
  SolveOptions o;
  o.threads = default_thread_count();
  return o;
}

// Expensive shared results, computed on first use.
struct Context {
  Scenario scenario = build_default_scenario();
  SolveOptions opts = default_opts();
  std::optional<CooperativeSolution> swm;
  std::optional<RbaResult> rba;

  const CooperativeSolution& cooperative() {
    if (!swm) swm = solve_swm(scenario, opts);
    return *swm;
  }
  const RbaResult& nash() {
    if (!rba) rba = rba_dg(scenario, RbaOptions{}, opts, cooperative());
    return *rba;
  }
};

double t_at_year_end(const Scenario& s, const Trajectory& traj) {
  return traj.states[static_cast<std::size_t>(s.horizon)].t_at;
}

// 1. Adjoint gradient vs central differences. The differences are taken on
// the extended-precision oracle: in double, rounding of a welfare total near
// 1e4 swamps the smallest coordinates.
Outcome gradient_check(Context& ctx) {
  const Scenario& s = ctx.scenario;
  const std::size_t n = s.region_count();
  const std::size_t steps = 21;  // T = 20
  std::mt19937_64 rng(20);
  std::uniform_real_distribution<double> us(0.1, 0.9), um(0.01, 0.99);
  double worst = 0;
  std::size_t checked = 0;
  for (int trial = 0; trial < 20; ++trial) {
    ControlProfile u(n, steps);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t t = 0; t < steps; ++t) u.at(i, t) = {us(rng), um(rng)};
    const auto adj = gradient_adjoint(s.x0, u, s.model, s.weights);
    const auto fd = oracle::welfare_gradient_fd(s.x0, flatten(u), steps, s.model, s.weights, 1e-3L);
    for (std::size_t k = 0; k < fd.size(); ++k) {
      if (std::abs(fd[k]) <= 1e-8) continue;
      ++checked;
      worst = std::max(worst, std::abs(adj[k] - fd[k]) / std::abs(fd[k]));
    }
  }
  return {worst < 1e-5,
          fmt::format("max relative error {:.3e} over {} coordinates (tolerance 1e-5)", worst,
                      checked)};
}

// 2. Conservation, fixed point, replay, prefix.
Outcome conservation(Context& ctx) {
  std::vector<std::string> bad;
  const Scenario& s = ctx.scenario;

  // Carbon mass under zero emissions through the full step map.
  Scenario z = s;
  z.path_length = 201;
  for (auto& g : z.growth.regions) g.sigma_initial = g.e_land_initial = 0;
  z.model.exo = generate_exogenous(z.growth, z.path_length);
  const ControlProfile u(z.region_count(), 200, {0.25, 0.0});
  const Trajectory tz = simulate(z.x0, u, z.model);
  double drift = 0;
  for (std::size_t k = 0; k + 1 < tz.states.size(); ++k) {
    const auto& a = tz.states[k];
    const auto& b = tz.states[k + 1];
    const double ma = a.m_at + a.m_up + a.m_lo, mb = b.m_at + b.m_up + b.m_lo;
    drift = std::max(drift, std::abs(mb - ma) / ma);
  }
  if (!(drift < 1e-9)) bad.push_back(fmt::format("carbon drift {:.3e}", drift));

  // Zero forcing keeps a zero temperature state at zero.
  Scenario f = z;
  f.model.exo.f_ex.assign(f.model.exo.f_ex.size(), 0.0);
  f.model.geo.zeta11 = f.model.geo.zeta22 = f.model.geo.zeta33 = 1;
  f.model.geo.zeta12 = f.model.geo.zeta21 = f.model.geo.zeta23 = f.model.geo.zeta32 = 0;
  f.x0.t_at = f.x0.t_lo = 0;
  f.x0.m_at = f.model.geo.m_at_1750;
  const Trajectory tf = simulate(f.x0, u, f.model);
  for (const auto& x : tf.states)
    if (x.t_at != 0 || x.t_lo != 0) {
      bad.push_back("temperature left the zero fixed point");
      break;
    }

  // Replay and prefix on the default scenario.
  const ControlProfile base = constant_profile(s, 0.25, 0.3);
  const Trajectory t1 = simulate(s.x0, base, s.model);
  const Trajectory t2 = simulate(s.x0, base, s.model);
  if (!(t1 == t2)) bad.push_back("replay not bit-identical");
  for (std::size_t k : {1u, 10u, 60u}) {
    const Trajectory tp = simulate(s.x0, base.prefix(k), s.model);
    bool same = tp.size() == k;
    for (std::size_t j = 0; same && j <= k; ++j) same = tp.states[j] == t1.states[j];
    for (std::size_t j = 0; same && j < k; ++j) same = tp.steps[j] == t1.steps[j];
    if (!same) bad.push_back(fmt::format("prefix {} differs", k));
  }
  if (!bad.empty()) return {false, fmt::format("{}", fmt::join(bad, "; "))};
  return {true, fmt::format("carbon drift {:.2e} over 200 steps; fixed point, replay, prefix hold",
                            drift)};
}

// 3. Tiny SWM against a refined lattice search.
//
// Two regions, controls on steps 0..3. Some coordinates have a closed-form
// optimum: s(3) sits at its lower bound (the capital it builds lies past the
// window) and mu(2), mu(3) at zero (their emissions reach the temperature
// only after step 3). Once the step-0 controls and both mu(1) are fixed, the
// temperatures at steps 2 and 3 are fixed too, and each region's (s(1), s(2))
// only moves its own payoff. So the lattice runs over the six coupled
// coordinates, with a per-region (s(1), s(2)) lattice inside each point.
// Every lattice has 9 points per coordinate and is refined twice around its
// incumbent, one cell on each side.
Scenario tiny_scenario(const Scenario& full) {
  Scenario s = full;
  const std::vector<std::size_t> keep{0, 5};  // US, China
  auto pick = [&](auto& v) {
    std::remove_reference_t<decltype(v)> out;
    for (std::size_t i : keep) out.push_back(v[i]);
    v = std::move(out);
  };
  pick(s.region_names);
  pick(s.clusters);
  pick(s.damage_loss_at_2c);
  pick(s.growth.regions);
  pick(s.model.regions);
  pick(s.x0.capital);
  s.horizon = 3;
  s.path_length = 8;
  s.model.exo = generate_exogenous(s.growth, s.path_length);
  s.weights = negishi_weights(s);
  return s;
}

constexpr int kLatticePoints = 9;
constexpr int kLatticeLevels = 3;

template <std::size_t D, class F>
std::pair<double, std::array<double, D>> refined_lattice(std::array<double, D> lo,
                                                         std::array<double, D> hi, F&& f) {
  const auto full_lo = lo, full_hi = hi;
  double best = -1e300;
  std::array<double, D> arg = lo;
  for (int level = 0; level < kLatticeLevels; ++level) {
    std::size_t count = 1;
    for (std::size_t c = 0; c < D; ++c) count *= kLatticePoints;
    for (std::size_t idx = 0; idx < count; ++idx) {
      std::array<double, D> x;
      std::size_t r = idx;
      for (std::size_t c = 0; c < D; ++c) {
        x[c] = lo[c] + (hi[c] - lo[c]) * static_cast<double>(r % kLatticePoints) /
                           (kLatticePoints - 1);
        r /= kLatticePoints;
      }
      const double v = f(x);
      if (v > best) {
        best = v;
        arg = x;
      }
    }
    for (std::size_t c = 0; c < D; ++c) {
      const double cell = (hi[c] - lo[c]) / (kLatticePoints - 1);
      lo[c] = std::max(full_lo[c], arg[c] - cell);
      hi[c] = std::min(full_hi[c], arg[c] + cell);
    }
  }
  return {best, arg};
}

double tiny_lattice_search(const Scenario& s) {
  const auto& b = s.bounds;
  const auto& m = s.model;
  const auto& exo = m.exo;

  // w_i L (pc^(1-alpha) - 1) / (1 - alpha) / (1 + rho)^(5t), pc in thousand USD.
  std::array<std::array<double, 4>, 2> scale{};
  for (std::size_t i = 0; i < 2; ++i)
    for (int t = 0; t < 4; ++t)
      scale[i][t] = s.weights[i] * exo.labor[i][t] / (1 - m.regions[i].alpha) /
                    std::pow(1 + m.regions[i].rho, kYearsPerStep * t);
  auto weighted_utility = [&](std::size_t i, double c, int t) {
    const double pc = std::max(1000 * c / exo.labor[i][t], kPerCapitaConsumptionFloor);
    return scale[i][t] * (std::pow(pc, 1 - m.regions[i].alpha) - 1);
  };

  // Coupled coordinates: s0_1, mu0_1, s0_2, mu0_2, mu1_1, mu1_2.
  auto outer = [&](const std::array<double, 6>& z) {
    const std::array<RegionControl, 2> u0{RegionControl{z[0], z[1]}, RegionControl{z[2], z[3]}};
    const auto r0 = step(0, s.x0, u0, m);
    // s(1) does not enter step 1's emissions or output, so any value will do
    // to advance the climate.
    const std::array<RegionControl, 2> u1{RegionControl{b.s_lower, z[4]},
                                          RegionControl{b.s_lower, z[5]}};
    const auto r1 = step(1, r0.next, u1, m);
    const RiceState& x2 = r1.next;
    const Vec2 temp3 =
        step_temperature({x2.t_at, x2.t_lo}, radiative_forcing(x2.m_at, exo.f_ex[2], m.geo), m.geo);

    double v = 0;
    for (std::size_t i = 0; i < 2; ++i) {
      v += weighted_utility(i, r0.diagnostics.consumption[i], 0);
      const auto& p = m.regions[i];
      const double k1 = r0.next.capital[i];
      const double q1 = r1.diagnostics.net_output[i];
      const double keep = std::pow(1 - p.delta_k, kYearsPerStep);
      // Net output per unit K^gamma at steps 2 and 3 (mu = 0 there).
      const double c2 = damage_fraction(x2.t_at, p) * exo.tfp[i][2] *
                        std::pow(exo.labor[i][2], 1 - p.gamma);
      const double c3 = damage_fraction(temp3[0], p) * exo.tfp[i][3] *
                        std::pow(exo.labor[i][3], 1 - p.gamma);
      auto own = [&](const std::array<double, 2>& sv) {
        const double k2 = keep * k1 + kYearsPerStep * sv[0] * q1;
        const double q2 = c2 * std::pow(k2, p.gamma);
        const double k3 = keep * k2 + kYearsPerStep * sv[1] * q2;
        const double q3 = c3 * std::pow(k3, p.gamma);
        return weighted_utility(i, (1 - sv[0]) * q1, 1) + weighted_utility(i, (1 - sv[1]) * q2, 2) +
               weighted_utility(i, (1 - b.s_lower) * q3, 3);
      };
      v += refined_lattice<2>({b.s_lower, b.s_lower}, {b.s_upper, b.s_upper}, own).first;
    }
    return v;
  };

  return refined_lattice<6>({b.s_lower, b.mu_lower, b.s_lower, b.mu_lower, b.mu_lower, b.mu_lower},
                            {b.s_upper, b.mu_upper, b.s_upper, b.mu_upper, b.mu_upper, b.mu_upper},
                            outer)
      .first;
}

Outcome brute_force(Context& ctx) {
  const Scenario s = tiny_scenario(ctx.scenario);
  const auto sol = solve_swm(s, ctx.opts);
  const double solver = sol.report.objective;
  const double lattice = tiny_lattice_search(s);
  const double rel = std::abs(solver - lattice) / std::abs(lattice);
  // Moving the closed-form coordinates onto their optimum must not gain more
  // than the tolerance either.
  ControlProfile pinned = sol.profile;
  for (std::size_t i = 0; i < 2; ++i) {
    pinned.at(i, 3).s = s.bounds.s_lower;
    pinned.at(i, 2).mu = pinned.at(i, 3).mu = 0;
  }
  const double pinned_value = weighted_welfare(simulate(s.x0, pinned, s.model), s.model, s.weights);
  const double pin_gain = (pinned_value - solver) / std::abs(solver);
  return {rel < 1e-6 && pin_gain < 1e-6,
          fmt::format("solver {:.12g}, lattice {:.12g}, relative gap {:.3e}; closed-form "
                      "coordinates gain {:.3e}",
                      solver, lattice, rel, pin_gain)};
}

// 4. Cooperative terminal temperature.
Outcome cooperative_headline(Context& ctx) {
  const auto& c = ctx.cooperative();
  const double t = t_at_year_end(ctx.scenario, c.trajectory);
  return {t >= 2.5 && t <= 3.5,
          fmt::format("t_at(2620) = {:.3f} degC under U^w (band [2.5, 3.5]); solver {} after {} "
                      "iterations",
                      t, to_string(c.report.reason), c.report.iterations)};
}

// 5. Nash terminal temperature and ordering against cooperation.
Outcome competition_headline(Context& ctx) {
  const auto& r = ctx.nash();
  const Trajectory tn = simulate(ctx.scenario.x0, r.profile, ctx.scenario.model);
  const Trajectory& tc = ctx.cooperative().trajectory;
  const double t = t_at_year_end(ctx.scenario, tn);
  int violations = 0;
  for (std::size_t k = 10; k < tn.states.size(); ++k)
    if (tn.states[k].t_at < tc.states[k].t_at) ++violations;
  return {t >= 5 && t <= 7 && violations == 0,
          fmt::format("t_at(2620) = {:.3f} degC under U^NE (band [5, 7]); {} steps >= 10 below "
                      "the cooperative path",
                      t, violations)};
}

// 6. RBA convergence and the epsilon-NE certificate.
Outcome rba_convergence(Context& ctx) {
  const auto& r = ctx.nash();
  std::string dist;
  std::optional<std::size_t> first_below;
  for (std::size_t k = 0; k < r.log.episodes.size(); ++k) {
    const double d = r.log.episodes[k].distance_inf;
    dist += fmt::format("{}{:.2e}", k ? " " : "", d);
    if (!first_below && d < 1e-3) first_below = k + 1;
  }
  const auto cert = verify_epsilon_ne(ctx.scenario, r.profile, ctx.opts);
  const bool ok = first_below.has_value() && cert.epsilon < 1e-3;
  return {ok, fmt::format("distances [{}]; below 1e-3 at episode {}; epsilon {:.3e}", dist,
                          first_below ? std::to_string(*first_below) : "never", cert.epsilon)};
}

// 7. Pareto frontier audit.
Outcome pareto_audit(Context& ctx) {
  const auto front = pareto_frontier(ctx.scenario, default_pareto_grid(21), ctx.opts);
  if (!front.failures.empty())
    return {false, fmt::format("{} grid points failed: {}", front.failures.size(),
                               front.failures.front())};
  double wd_min = 1e300, wd_max = -1e300, t_min = 1e300, t_max = -1e300;
  for (const auto& p : front.points) {
    wd_min = std::min(wd_min, p.w_developed);
    wd_max = std::max(wd_max, p.w_developed);
    t_min = std::min(t_min, p.t_at_final);
    t_max = std::max(t_max, p.t_at_final);
  }
  const double spread = (wd_max - wd_min) / std::abs(wd_max);
  const bool ok = front.points.size() == 21 && front.dominated.empty() && spread < 0.01 &&
                  t_min >= 2.5 && t_max <= 3.6;
  return {ok, fmt::format("{} points, {} dominated pairs; W_developed spread {:.3f}%; t_at(2620) "
                          "in [{:.3f}, {:.3f}] degC",
                          front.points.size(), front.dominated.size(), 100 * spread, t_min,
                          t_max)};
}

// 8. MPC deviation from U^w shrinks as the window grows.
Outcome mpc_fidelity(Context& ctx) {
  const auto& uw = ctx.cooperative().profile;
  const int steps = 50;
  std::vector<double> dev;
  for (int t_rh : {10, 20, 60}) {
    const auto r = mpc_rice(ctx.scenario, MpcConfig{steps, t_rh}, ctx.opts);
    double sq = 0;
    for (std::size_t i = 0; i < uw.regions(); ++i)
      for (int t = 0; t < steps; ++t) {
        const double ds = r.profile.at(i, t).s - uw.at(i, t).s;
        const double dm = r.profile.at(i, t).mu - uw.at(i, t).mu;
        sq += ds * ds + dm * dm;
      }
    dev.push_back(std::sqrt(sq));
  }
  const bool ok = dev[0] >= dev[1] && dev[1] >= dev[2];
  return {ok, fmt::format("||U^rhw - U^w|| over 50 steps: T_rh=10 {:.4f}, 20 {:.4f}, 60 {:.4f}",
                          dev[0], dev[1], dev[2])};
}

// 9. RHFA terminal temperature ordering.
Outcome rhfa_ordering(Context& ctx) {
  const auto& coop = ctx.cooperative();
  const std::vector<RegionControl> first = coop.profile.at_step(0);
  const int t_sim = ctx.scenario.horizon;
  std::vector<double> terminal;
  int violations = 0;
  for (int t_rh : {5, 10, 20}) {
    const auto r = rhfa_dg(ctx.scenario, t_sim, t_rh, ctx.opts, first);
    terminal.push_back(r.trajectory.states.back().t_at);
    for (std::size_t k = 10; k < r.trajectory.states.size(); ++k)
      if (r.trajectory.states[k].t_at < coop.trajectory.states[k].t_at) ++violations;
  }
  const bool ok = terminal[0] >= terminal[1] && terminal[1] >= terminal[2] && violations == 0;
  return {ok, fmt::format("t_at(2620): T_rh=5 {:.3f}, 10 {:.3f}, 20 {:.3f} degC; {} steps >= 10 "
                          "below the cooperative path",
                          terminal[0], terminal[1], terminal[2], violations)};
}

// 10. SCC sign and regional ordering.
Outcome scc_properties(Context& ctx) {
  const Scenario& s = ctx.scenario;
  Scenario z = s;
  for (auto& p : z.model.regions) p.a1 = p.a2 = 0;
  const ControlProfile base = constant_profile(z, 0.25, 0.1);
  double worst_zero = 0;
  for (int t : {0, 4, 10, 20})
    for (std::size_t i = 0; i < z.region_count(); ++i)
      worst_zero = std::max(
          worst_zero,
          std::abs(social_cost_of_co2(z.x0, base, z.model, i, t, kDefaultSccPulse)));

  const auto rows = scc_table(s, ctx.cooperative().profile, {0, 4, 10, 20});
  std::map<std::pair<int, std::string>, double> scc;
  for (const auto& r : rows) scc[{r.year, r.region}] = r.scc;
  int order_failures = 0;
  std::string summary;
  for (int year : {2020, 2040, 2070, 2120}) {
    const double us = scc[{year, "US"}];
    for (const char* r : {"India", "Africa", "OthAsia"})
      if (!(scc[{year, r}] > us)) ++order_failures;
    summary += fmt::format(" {}: US {:.1f} India {:.1f} Africa {:.1f} OthAsia {:.1f};", year, us,
                           scc[{year, "India"}], scc[{year, "Africa"}], scc[{year, "OthAsia"}]);
  }
  const bool ok = worst_zero < 0.5 && order_failures == 0;
  return {ok, fmt::format("zero-damage max |SCC| {:.2e};{} {} ordering failures", worst_zero,
                          summary, order_failures)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<Outcome(Context&)>>> criteria{
      {"gradient correctness", gradient_check},
      {"conservation suite", conservation},
      {"brute-force oracle", brute_force},
      {"cooperative headline", cooperative_headline},
      {"competition headline", competition_headline},
      {"RBA-DG convergence", rba_convergence},
      {"Pareto audit", pareto_audit},
      {"MPC fidelity", mpc_fidelity},
      {"RHFA ordering", rhfa_ordering},
      {"SCC properties", scc_properties},
  };
  std::set<int> selected;
  for (int a = 1; a < argc; ++a) selected.insert(std::atoi(argv[a]));

  Context ctx;
  int failures = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const int id = static_cast<int>(k) + 1;
    if (!selected.empty() && !selected.count(id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[k].second(ctx);
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!o.pass) ++failures;
    std::printf("CRITERION %d %s: %s (%s) [%.1f s]\n", id, criteria[k].first,
                o.pass ? "PASS" : "FAIL", o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
