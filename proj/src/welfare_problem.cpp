#include "rice/welfare_problem.hpp"

#include <cmath>
#include <numbers>

#include "rice/errors.hpp"

namespace rice {

double welfare_and_gradient(const RiceState& x0, const ControlProfile& profile,
                            const ModelParams& model, std::span<const double> weights,
                            int start_step, std::span<double> grad) {
  const std::size_t n = model.region_count();
  const std::size_t h = profile.steps();
  if (weights.size() != n) throw DomainError("welfare: one weight per region required");
  const Trajectory traj = simulate(x0, profile, model, start_step);

  double total = 0;
  for (std::size_t i = 0; i < n; ++i)
    if (weights[i] != 0) total += weights[i] * regional_welfare(traj, model, i);
  if (grad.empty()) return total;
  if (grad.size() != 2 * n * h) throw DomainError("welfare: gradient buffer has the wrong length");

  const auto& geo = model.geo;
  const auto& exo = model.exo;
  // Adjoint of the state after the current step; zero past the window.
  double lt_at = 0, lt_lo = 0, lm_at = 0, lm_up = 0, lm_lo = 0;
  std::vector<double> lk(n, 0.0);

  for (std::size_t k = h; k-- > 0;) {
    const int t = start_step + static_cast<int>(k);
    const RiceState& x = traj.states[k];
    const StepDiagnostics& d = traj.steps[k];
    const double v_e = lm_at * geo.xi1;  // d objective / d E
    double dt_at = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto& p = model.regions[i];
      const RegionControl u = profile.at(i, k);
      const double l = exo.labor[i][t];
      const double y = d.gross_output[i];
      const double q = d.net_output[i];
      const double lam = d.abatement[i];
      const double om = d.damage[i];
      const double sigma = exo.sigma[i][t];

      double w = 0;  // d objective / d C_i
      if (!d.consumption_floored[i] && weights[i] != 0) {
        const double pc = kBillionPerTrillion * d.consumption[i] / l;
        w = weights[i] * kBillionPerTrillion * std::pow(pc, -p.alpha) /
            std::pow(1.0 + p.rho, kYearsPerStep * t);
      }
      const double v_q = w * (1.0 - u.s) + lk[i] * kYearsPerStep * u.s;
      const double theta1 = backstop_theta1(t, p, sigma);
      const double dlam_dmu = u.mu > 0 ? -theta1 * p.theta2 * std::pow(u.mu, p.theta2 - 1.0) : 0.0;

      grad[(i * h + k) * 2 + 0] = -w * q + lk[i] * kYearsPerStep * q;
      grad[(i * h + k) * 2 + 1] = v_q * om * y * dlam_dmu - v_e * sigma * y;

      const double dy = v_q * om * lam + v_e * sigma * (1.0 - u.mu);
      const double dk_y = p.gamma * y / x.capital[i];
      lk[i] = dy * dk_y + lk[i] * std::pow(1.0 - p.delta_k, kYearsPerStep);

      double domega = -p.a1;
      if (p.a2 != 0 && x.t_at > 0) domega -= p.a2 * p.a3 * std::pow(x.t_at, p.a3 - 1.0);
      dt_at += v_q * lam * y * domega;
    }

    const double n_t_at = dt_at + geo.phi11 * lt_at + geo.phi21 * lt_lo;
    const double n_t_lo = geo.phi12 * lt_at + geo.phi22 * lt_lo;
    const double dforcing = geo.eta / (x.m_at * std::numbers::ln2);
    const double n_m_at = geo.zeta11 * lm_at + geo.zeta21 * lm_up + geo.xi2 * lt_at * dforcing;
    const double n_m_up = geo.zeta12 * lm_at + geo.zeta22 * lm_up + geo.zeta32 * lm_lo;
    const double n_m_lo = geo.zeta23 * lm_up + geo.zeta33 * lm_lo;
    lt_at = n_t_at;
    lt_lo = n_t_lo;
    lm_at = n_m_at;
    lm_up = n_m_up;
    lm_lo = n_m_lo;
  }
  return total;
}

std::vector<double> gradient_adjoint(const RiceState& x0, const ControlProfile& profile,
                                     const ModelParams& model, std::span<const double> weights) {
  std::vector<double> g(2 * profile.regions() * profile.steps());
  welfare_and_gradient(x0, profile, model, weights, 0, g);
  return g;
}

std::vector<double> flatten(const ControlProfile& profile) {
  std::vector<double> v;
  v.reserve(2 * profile.regions() * profile.steps());
  for (std::size_t i = 0; i < profile.regions(); ++i)
    for (std::size_t t = 0; t < profile.steps(); ++t) {
      v.push_back(profile.at(i, t).s);
      v.push_back(profile.at(i, t).mu);
    }
  return v;
}

ControlProfile unflatten(std::span<const double> values, std::size_t regions, std::size_t steps) {
  if (values.size() != 2 * regions * steps) throw DomainError("unflatten: length mismatch");
  ControlProfile p(regions, steps);
  for (std::size_t i = 0; i < regions; ++i)
    for (std::size_t t = 0; t < steps; ++t)
      p.at(i, t) = {values[(i * steps + t) * 2], values[(i * steps + t) * 2 + 1]};
  return p;
}

DecisionVector make_decision_vector(const ControlProfile& profile, const ControlBounds& b) {
  DecisionVector dv;
  dv.values = flatten(profile);
  const std::size_t m = profile.regions() * profile.steps();
  for (std::size_t k = 0; k < m; ++k) {
    dv.lower.insert(dv.lower.end(), {b.s_lower, b.mu_lower});
    dv.upper.insert(dv.upper.end(), {b.s_upper, b.mu_upper});
  }
  return dv;
}

WindowProblem::WindowProblem(const ModelParams& model, RiceState x0, int start_step,
                             std::vector<double> weights, ControlProfile base,
                             std::vector<std::size_t> free_regions)
    : model_(model), x0_(std::move(x0)), start_(start_step), weights_(std::move(weights)),
      base_(std::move(base)), free_(std::move(free_regions)) {
  if (weights_.size() != model_.region_count() || base_.regions() != model_.region_count())
    throw DomainError("WindowProblem: region count mismatch");
  for (std::size_t i : free_)
    if (i >= model_.region_count()) throw DomainError("WindowProblem: free region out of range");
}

std::vector<double> WindowProblem::pack(const ControlProfile& profile) const {
  std::vector<double> x;
  x.reserve(size());
  for (std::size_t i : free_)
    for (std::size_t t = 0; t < steps(); ++t) {
      x.push_back(profile.at(i, t).s);
      x.push_back(profile.at(i, t).mu);
    }
  return x;
}

ControlProfile WindowProblem::unpack(std::span<const double> x) const {
  ControlProfile p = base_;
  std::size_t k = 0;
  for (std::size_t i : free_)
    for (std::size_t t = 0; t < steps(); ++t, k += 2) p.at(i, t) = {x[k], x[k + 1]};
  return p;
}

void WindowProblem::bounds(const ControlBounds& b, std::vector<double>& lower,
                           std::vector<double>& upper) const {
  lower.clear();
  upper.clear();
  for (std::size_t k = 0; k < free_.size() * steps(); ++k) {
    lower.insert(lower.end(), {b.s_lower, b.mu_lower});
    upper.insert(upper.end(), {b.s_upper, b.mu_upper});
  }
}

double WindowProblem::value(std::span<const double> x) const {
  return welfare_and_gradient(x0_, unpack(x), model_, weights_, start_, {});
}

double WindowProblem::value_and_gradient(std::span<const double> x, std::span<double> grad) const {
  std::vector<double> full(2 * base_.regions() * steps());
  const double v = welfare_and_gradient(x0_, unpack(x), model_, weights_, start_, full);
  std::size_t k = 0;
  for (std::size_t i : free_)
    for (std::size_t t = 0; t < steps(); ++t, k += 2) {
      grad[k] = full[(i * steps() + t) * 2];
      grad[k + 1] = full[(i * steps() + t) * 2 + 1];
    }
  return v;
}

Objective WindowProblem::objective() const {
  return [this](std::span<const double> x, std::span<double> g) { return value_and_gradient(x, g); };
}

std::vector<double> WindowProblem::period_scale(const ControlProfile& profile) const {
  const Trajectory traj = simulate(x0_, profile, model_, start_);
  const std::size_t h = steps();
  std::vector<double> share(h, 0.0);
  for (std::size_t k = 0; k < h; ++k) {
    const int t = start_ + static_cast<int>(k);
    for (std::size_t i = 0; i < model_.region_count(); ++i) {
      if (weights_[i] == 0) continue;
      const auto& p = model_.regions[i];
      const double l = model_.exo.labor[i][t];
      const double pc = per_capita_consumption(traj.steps[k].consumption[i], l);
      share[k] += weights_[i] * l * std::pow(pc, 1.0 - p.alpha) /
                  std::pow(1.0 + p.rho, kYearsPerStep * t);
    }
  }
  std::vector<double> scale;
  scale.reserve(size());
  for (std::size_t r = 0; r < free_.size(); ++r)
    for (std::size_t k = 0; k < h; ++k) {
      const double v = share[0] > 0 && share[k] > 0 ? 1.0 / std::sqrt(share[k] / share[0]) : 1.0;
      scale.push_back(v);
      scale.push_back(v);
    }
  return scale;
}

WindowSolution solve_window(const WindowProblem& problem, const ControlBounds& bounds,
                            const ControlProfile& init, SolveOptions opts) {
  std::vector<double> lower, upper;
  problem.bounds(bounds, lower, upper);
  std::vector<double> x0 = problem.pack(init);
  for (std::size_t k = 0; k < x0.size(); ++k) x0[k] = std::clamp(x0[k], lower[k], upper[k]);
  if (opts.variable_scale.empty()) opts.variable_scale = problem.period_scale(problem.unpack(x0));
  WindowSolution sol;
  sol.report = maximize(problem.objective(), lower, upper, x0, opts);
  sol.profile = problem.unpack(sol.report.x);
  return sol;
}

}  // namespace rice
