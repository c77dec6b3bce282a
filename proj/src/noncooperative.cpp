#include "rice/noncooperative.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <limits>

#include "rice/errors.hpp"
#include "rice/parallel.hpp"

namespace rice {

namespace {

std::vector<double> indicator(std::size_t n, std::size_t i) {
  std::vector<double> w(n, 0.0);
  w[i] = 1.0;
  return w;
}

void copy_region(ControlProfile& dst, const ControlProfile& src, std::size_t i) {
  for (std::size_t t = 0; t < dst.steps(); ++t) dst.at(i, t) = src.at(i, t);
}

SolveOptions single_threaded(SolveOptions opts) {
  opts.threads = 1;
  return opts;
}

}  // namespace

BestResponse best_response(const Scenario& scenario, std::size_t region,
                           const ControlProfile& fixed, const SolveOptions& opts,
                           std::optional<ControlProfile> init) {
  const std::size_t n = scenario.region_count();
  if (region >= n) throw DomainError("best_response: region out of range");
  if (fixed.regions() != n || fixed.steps() != scenario.steps())
    throw DomainError("best_response: fixed profile must cover every region over the horizon");
  ControlProfile base = fixed;
  if (init) copy_region(base, *init, region);
  WindowProblem problem(scenario.model, scenario.x0, 0, indicator(n, region), base, {region});
  auto sol = solve_window(problem, scenario.bounds, base, opts);
  BestResponse br;
  br.welfare = sol.report.objective;
  br.profile = std::move(sol.profile);
  br.report = std::move(sol.report);
  return br;
}

RbaResult rba_dg(const Scenario& scenario, const RbaOptions& rba, const SolveOptions& opts,
                 std::optional<CooperativeSolution> cooperative) {
  if (rba.episodes < 1) throw DomainError("rba_dg: at least one episode required");
  RbaResult out;
  out.cooperative = cooperative ? std::move(*cooperative) : solve_swm(scenario, opts);
  const std::size_t n = scenario.region_count();
  ControlProfile u = out.cooperative.profile;
  out.log.initial = u;
  const SolveOptions inner = single_threaded(opts);

  for (int k = 0; k < rba.episodes; ++k) {
    ControlProfile next = u;
    auto respond = [&](std::size_t i, const ControlProfile& against) {
      try {
        return best_response(scenario, i, against, inner);
      } catch (const std::exception& e) {
        throw std::runtime_error(
            fmt::format("best response failed in episode {} for region {}: {}", k + 1, i, e.what()));
      }
    };
    if (rba.rule == UpdateRule::jacobi) {
      std::vector<ControlProfile> responses(n);
      parallel_for(n, opts.threads, [&](std::size_t i) { responses[i] = respond(i, u).profile; });
      for (std::size_t i = 0; i < n; ++i) copy_region(next, responses[i], i);
    } else {
      for (std::size_t i = 0; i < n; ++i) copy_region(next, respond(i, next).profile, i);
    }

    Episode ep;
    double sq = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t t = 0; t < u.steps(); ++t) {
        const double ds = std::abs(next.at(i, t).s - u.at(i, t).s);
        const double dm = std::abs(next.at(i, t).mu - u.at(i, t).mu);
        ep.distance_inf = std::max({ep.distance_inf, ds, dm});
        sq += ds * ds + dm * dm;
      }
    ep.distance_2 = std::sqrt(sq);
    ep.welfares = regional_welfares(simulate(scenario.x0, next, scenario.model), scenario.model);
    ep.profile = next;
    u = std::move(next);
    const bool done = ep.distance_inf < rba.early_stop;
    out.log.episodes.push_back(std::move(ep));
    if (done) {
      out.log.stopped_early = k + 1 < rba.episodes;
      break;
    }
  }
  out.profile = std::move(u);
  return out;
}

NeCertificate verify_epsilon_ne(const Scenario& scenario, const ControlProfile& candidate,
                                const SolveOptions& opts) {
  const std::size_t n = scenario.region_count();
  NeCertificate cert;
  cert.welfare_candidate = regional_welfares(simulate(scenario.x0, candidate, scenario.model),
                                             scenario.model);
  cert.welfare_deviation.resize(n);
  cert.relative_gain.resize(n);
  const SolveOptions inner = single_threaded(opts);
  parallel_for(n, opts.threads, [&](std::size_t i) {
    cert.welfare_deviation[i] = best_response(scenario, i, candidate, inner).welfare;
  });
  cert.epsilon = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    cert.relative_gain[i] = (cert.welfare_deviation[i] - cert.welfare_candidate[i]) /
                            std::abs(cert.welfare_candidate[i]);
    cert.epsilon = std::max(cert.epsilon, cert.relative_gain[i]);
  }
  return cert;
}

RhfaResult rhfa_dg(const Scenario& scenario, int t_sim, int t_rh, const SolveOptions& opts,
                   std::optional<std::vector<RegionControl>> first) {
  if (t_sim < 1 || t_rh < 1) throw DomainError("rhfa: t_sim and t_rh must be at least 1");
  if (static_cast<std::size_t>(t_sim + t_rh) > scenario.model.exo.length())
    throw DomainError(fmt::format("rhfa: exogenous paths cover {} steps, need t_sim + t_rh = {}",
                                  scenario.model.exo.length(), t_sim + t_rh));
  const std::size_t n = scenario.region_count();
  const std::size_t h = static_cast<std::size_t>(t_rh);

  // Each region's own plan for the next window, used only as a warm start.
  std::vector<std::vector<RegionControl>> plans(n, std::vector<RegionControl>(h));
  if (!first) {
    const auto coop = solve_swm(scenario, opts);
    first = coop.profile.at_step(0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < h; ++k)
        plans[i][k] = coop.profile.at(i, std::min(k + 1, coop.profile.steps() - 1));
  } else {
    if (first->size() != n) throw DomainError("rhfa: one first control per region required");
    for (std::size_t i = 0; i < n; ++i) std::fill(plans[i].begin(), plans[i].end(), (*first)[i]);
  }

  RhfaResult out;
  out.profile = ControlProfile(n, static_cast<std::size_t>(t_sim));
  for (std::size_t i = 0; i < n; ++i) out.profile.at(i, 0) = (*first)[i];
  out.trajectory.states.push_back(scenario.x0);
  const SolveOptions inner = single_threaded(opts);

  for (int t = 0; t < t_sim; ++t) {
    const auto played = out.profile.at_step(t);
    auto r = step(t, out.trajectory.states.back(), played, scenario.model);
    out.trajectory.states.push_back(std::move(r.next));
    out.trajectory.steps.push_back(std::move(r.diagnostics));
    if (t + 1 == t_sim) break;

    const RiceState& x_next = out.trajectory.states.back();
    std::vector<ControlProfile> solved(n);
    parallel_for(n, opts.threads, [&](std::size_t i) {
      ControlProfile window(n, h);
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < h; ++k) window.at(j, k) = j == i ? plans[i][k] : played[j];
      try {
        WindowProblem problem(scenario.model, x_next, t + 1, indicator(n, i), window, {i});
        solved[i] = solve_window(problem, scenario.bounds, window, inner).profile;
      } catch (const std::exception& e) {
        throw std::runtime_error(
            fmt::format("rhfa window solve failed at step {} for region {}: {}", t + 1, i, e.what()));
      }
    });
    for (std::size_t i = 0; i < n; ++i) {
      out.profile.at(i, t + 1) = solved[i].at(i, 0);
      for (std::size_t k = 0; k < h; ++k) plans[i][k] = solved[i].at(i, std::min(k + 1, h - 1));
    }
  }
  return out;
}

}  // namespace rice
