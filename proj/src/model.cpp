#include "rice/model.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "rice/errors.hpp"

namespace rice {

Mat3 GeoParams::carbon_matrix() const {
  return {{{zeta11, zeta12, 0.0}, {zeta21, zeta22, zeta23}, {0.0, zeta32, zeta33}}};
}

std::vector<double> RiceState::to_vector() const {
  std::vector<double> v{t_at, t_lo, m_at, m_up, m_lo};
  v.insert(v.end(), capital.begin(), capital.end());
  return v;
}

RiceState RiceState::from_vector(std::span<const double> v) {
  if (v.size() < 5) throw DomainError("state vector needs at least 5 entries");
  RiceState x;
  x.t_at = v[0];
  x.t_lo = v[1];
  x.m_at = v[2];
  x.m_up = v[3];
  x.m_lo = v[4];
  x.capital.assign(v.begin() + 5, v.end());
  return x;
}

ControlProfile::ControlProfile(std::size_t regions, std::size_t steps, RegionControl fill)
    : regions_(regions), steps_(steps), data_(regions * steps, fill) {}

std::vector<RegionControl> ControlProfile::at_step(std::size_t t) const {
  std::vector<RegionControl> u(regions_);
  for (std::size_t i = 0; i < regions_; ++i) u[i] = at(i, t);
  return u;
}

ControlProfile ControlProfile::prefix(std::size_t steps) const {
  if (steps > steps_) throw DomainError("prefix longer than profile");
  ControlProfile out(regions_, steps);
  for (std::size_t i = 0; i < regions_; ++i)
    for (std::size_t t = 0; t < steps; ++t) out.at(i, t) = at(i, t);
  return out;
}

bool Trajectory::any_consumption_floored() const {
  for (const auto& d : steps)
    for (char f : d.consumption_floored)
      if (f) return true;
  return false;
}

double radiative_forcing(double m_at, double f_ex, const GeoParams& geo) {
  if (!(m_at > 0)) throw DomainError("radiative_forcing: atmospheric carbon must be positive");
  return geo.eta * std::log2(m_at / geo.m_at_1750) + f_ex;
}

Vec3 step_carbon(const Vec3& m, double e_total, const GeoParams& geo) {
  return {geo.zeta11 * m[0] + geo.zeta12 * m[1] + geo.xi1 * e_total,
          geo.zeta21 * m[0] + geo.zeta22 * m[1] + geo.zeta23 * m[2],
          geo.zeta32 * m[1] + geo.zeta33 * m[2]};
}

Vec2 step_temperature(const Vec2& temp, double forcing, const GeoParams& geo) {
  return {geo.phi11 * temp[0] + geo.phi12 * temp[1] + geo.xi2 * forcing,
          geo.phi21 * temp[0] + geo.phi22 * temp[1]};
}

double gross_output(double a, double k, double l, double gamma) {
  if (!(a > 0) || !(k > 0) || !(l > 0))
    throw DomainError("gross_output: TFP, capital and labor must be positive");
  return a * std::pow(k, gamma) * std::pow(l, 1.0 - gamma);
}

double backstop_theta1(int t, const RegionParams& p, double sigma_t) {
  if (t < 0) throw DomainError("backstop_theta1: negative step");
  const double base = 1.0 - p.delta_pb;
  if (t == 0 && base == 0.0)
    throw DomainError("backstop_theta1: delta_pb = 1 at step 0 divides by zero");
  return p.pb / (1000.0 * p.theta2) * std::pow(base, t - 1) * sigma_t;
}

double abatement_fraction(double mu, double theta1, double theta2) {
  if (mu < 0 || mu > 1) throw DomainError("abatement_fraction: mu outside [0,1]");
  if (theta1 < 0) throw DomainError("abatement_fraction: negative theta1");
  const double lambda = 1.0 - theta1 * std::pow(mu, theta2);
  if (!(lambda > 0))
    throw ModelBreakdown("abatement cost exceeds gross output (Lambda <= 0)");
  return lambda;
}

double damage_fraction(double t_at, const RegionParams& p) {
  if (t_at < 0) throw DomainError("damage_fraction: negative temperature deviation");
  const double omega = 1.0 - p.a1 * t_at - p.a2 * std::pow(t_at, p.a3);
  if (!(omega > 0)) throw ModelBreakdown("climate damage exceeds gross output (Omega <= 0)");
  return omega;
}

double global_emissions(std::span<const double> outputs, std::span<const double> mus,
                        std::span<const double> sigma, std::span<const double> e_land) {
  const auto n = outputs.size();
  if (mus.size() != n || sigma.size() != n || e_land.size() != n)
    throw DomainError("global_emissions: length mismatch");
  double e = 0;
  for (std::size_t i = 0; i < n; ++i) e += sigma[i] * (1.0 - mus[i]) * outputs[i] + e_land[i];
  return e;
}

double step_capital(double k, double s, double q_net, double delta_k) {
  if (!(k > 0)) throw DomainError("step_capital: capital must be positive");
  if (s < 0 || s > 1) throw DomainError("step_capital: saving rate outside [0,1]");
  if (!(q_net > 0)) throw DomainError("step_capital: net output must be positive");
  return std::pow(1.0 - delta_k, kYearsPerStep) * k + kYearsPerStep * s * q_net;
}

StepResult step(int t, const RiceState& x, std::span<const RegionControl> u,
                const ModelParams& model, double extra_emissions) {
  const std::size_t n = model.region_count();
  if (u.size() != n || x.capital.size() != n)
    throw DomainError("step: region count mismatch");
  if (t < 0 || static_cast<std::size_t>(t) >= model.exo.length())
    throw DomainError("step: exogenous paths do not cover step " + std::to_string(t));
  const auto& exo = model.exo;

  StepDiagnostics d;
  d.gross_output.resize(n);
  d.net_output.resize(n);
  d.consumption.resize(n);
  d.emissions.resize(n);
  d.abatement.resize(n);
  d.damage.resize(n);
  d.consumption_floored.assign(n, 0);

  RiceState next;
  next.capital.resize(n);
  double e_total = extra_emissions;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& p = model.regions[i];
    const auto& ui = u[i];
    if (ui.s < 0 || ui.s > 1 || ui.mu < 0 || ui.mu > 1)
      throw DomainError("step: control outside [0,1] for region " + std::to_string(i));
    const double y = gross_output(exo.tfp[i][t], x.capital[i], exo.labor[i][t], p.gamma);
    const double lambda = abatement_fraction(ui.mu, backstop_theta1(t, p, exo.sigma[i][t]), p.theta2);
    const double omega = damage_fraction(x.t_at, p);
    const double q = omega * lambda * y;
    const double c = (1.0 - ui.s) * q;
    d.gross_output[i] = y;
    d.abatement[i] = lambda;
    d.damage[i] = omega;
    d.net_output[i] = q;
    d.consumption[i] = c;
    d.consumption_floored[i] = kBillionPerTrillion * c / exo.labor[i][t] < kPerCapitaConsumptionFloor;
    d.emissions[i] = exo.sigma[i][t] * (1.0 - ui.mu) * y + exo.e_land[i][t];
    e_total += d.emissions[i];
    next.capital[i] = step_capital(x.capital[i], ui.s, q, p.delta_k);
  }
  d.total_emissions = e_total;

  const Vec3 m = step_carbon({x.m_at, x.m_up, x.m_lo}, e_total, model.geo);
  // Temperature responds to the forcing of the current atmospheric stock.
  d.forcing = radiative_forcing(x.m_at, exo.f_ex[t], model.geo);
  const Vec2 temp = step_temperature({x.t_at, x.t_lo}, d.forcing, model.geo);
  next.m_at = m[0];
  next.m_up = m[1];
  next.m_lo = m[2];
  next.t_at = temp[0];
  next.t_lo = temp[1];
  return {std::move(next), std::move(d)};
}

Trajectory simulate(const RiceState& x0, const ControlProfile& profile,
                    const ModelParams& model, int start_step,
                    std::optional<EmissionPulse> pulse) {
  if (profile.regions() != model.region_count())
    throw DomainError("simulate: profile region count mismatch");
  if (start_step < 0 ||
      static_cast<std::size_t>(start_step) + profile.steps() > model.exo.length())
    throw DomainError("simulate: profile extends beyond the exogenous paths");
  Trajectory traj;
  traj.start_step = start_step;
  traj.states.reserve(profile.steps() + 1);
  traj.steps.reserve(profile.steps());
  traj.states.push_back(x0);
  for (std::size_t k = 0; k < profile.steps(); ++k) {
    const int t = start_step + static_cast<int>(k);
    const double extra = pulse && pulse->step == t ? pulse->gtco2_per_year : 0.0;
    try {
      auto r = step(t, traj.states.back(), profile.at_step(k), model, extra);
      traj.states.push_back(std::move(r.next));
      traj.steps.push_back(std::move(r.diagnostics));
    } catch (const SimulationError&) {
      throw;
    } catch (const std::exception& e) {
      throw SimulationError(t, e.what());
    }
  }
  return traj;
}

double utility(double c, double l, double alpha, double rho, int t) {
  if (!(c > 0)) throw DomainError("utility: consumption must be positive");
  if (!(l > 0)) throw DomainError("utility: population must be positive");
  const double discount = std::pow(1.0 + rho, kYearsPerStep * t);
  const double pc = c / l;
  const double u = alpha == 1.0 ? l * std::log(pc)
                                : l * (std::pow(pc, 1.0 - alpha) - 1.0) / (1.0 - alpha);
  return u / discount;
}

double per_capita_consumption(double c, double l) {
  return std::max(kBillionPerTrillion * c / l, kPerCapitaConsumptionFloor);
}

namespace {

double welfare_with_offset(const Trajectory& traj, const ModelParams& model,
                           std::size_t region, int offset_step, double offset) {
  const auto& p = model.regions.at(region);
  double j = 0;
  for (std::size_t k = 0; k < traj.steps.size(); ++k) {
    const int t = traj.start_step + static_cast<int>(k);
    const double l = model.exo.labor[region][t];
    double c = traj.steps[k].consumption[region];
    if (t == offset_step) c += offset;
    j += utility(per_capita_consumption(c, l) * l, l, p.alpha, p.rho, t);
  }
  return j;
}

}  // namespace

double regional_welfare(const Trajectory& traj, const ModelParams& model, std::size_t region) {
  return welfare_with_offset(traj, model, region, -1, 0.0);
}

std::vector<double> regional_welfares(const Trajectory& traj, const ModelParams& model) {
  std::vector<double> j(model.region_count());
  for (std::size_t i = 0; i < j.size(); ++i) j[i] = regional_welfare(traj, model, i);
  return j;
}

double weighted_welfare(const Trajectory& traj, const ModelParams& model,
                        std::span<const double> weights) {
  if (weights.size() != model.region_count())
    throw DomainError("weighted_welfare: one weight per region required");
  double sum = 0;
  for (double c : weights) {
    if (c < 0) throw DomainError("weighted_welfare: negative weight");
    sum += c;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw DomainError("weighted_welfare: weights must sum to 1");
  double w = 0;
  for (std::size_t i = 0; i < weights.size(); ++i)
    if (weights[i] != 0) w += weights[i] * regional_welfare(traj, model, i);
  return w;
}

double social_cost_of_co2(const RiceState& x0, const ControlProfile& profile,
                          const ModelParams& model, std::size_t region, int t,
                          double eps) {
  if (!(eps > 0)) throw DomainError("social_cost_of_co2: eps must be positive");
  if (t < 0 || static_cast<std::size_t>(t) >= profile.steps())
    throw DomainError("social_cost_of_co2: step outside the profile");

  const auto up = simulate(x0, profile, model, 0, EmissionPulse{t, eps});
  const auto down = simulate(x0, profile, model, 0, EmissionPulse{t, -eps});
  const double dj_de =
      (regional_welfare(up, model, region) - regional_welfare(down, model, region)) / (2 * eps);

  const auto base = simulate(x0, profile, model);
  const double c = base.steps[t].consumption[region];
  const double eps_c = 1e-4 * c;
  const double dj_dc = (welfare_with_offset(base, model, region, t, eps_c) -
                        welfare_with_offset(base, model, region, t, -eps_c)) /
                       (2 * eps_c);
  if (std::abs(dj_dc) < 1e-300)
    throw DomainError("social_cost_of_co2: marginal utility of consumption vanishes");
  return -1000.0 * dj_de / dj_dc;
}

}  // namespace rice
