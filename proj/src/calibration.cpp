#include "rice/calibration.hpp"

#include <cmath>
#include <fmt/format.h>
#include <numeric>

#include "rice/errors.hpp"
#include "rice/scenario_io.hpp"

namespace rice {

DamageCoefficients calibrate_damage(double loss_at_2c) {
  if (!(loss_at_2c > 0 && loss_at_2c < 1))
    throw DomainError("calibrate_damage: loss must lie in (0, 1)");
  return {0.0, loss_at_2c / 4.0, 2.0};
}

ExogenousPaths generate_exogenous(const ExogenousGrowthSpec& spec, std::size_t length) {
  if (length < 1) throw DomainError("generate_exogenous: length must be at least 1");
  const std::size_t n = spec.regions.size();
  ExogenousPaths exo;
  exo.tfp.assign(n, std::vector<double>(length));
  exo.labor.assign(n, std::vector<double>(length));
  exo.sigma.assign(n, std::vector<double>(length));
  exo.e_land.assign(n, std::vector<double>(length));
  for (std::size_t i = 0; i < n; ++i) {
    const auto& g = spec.regions[i];
    double a = g.tfp_initial;
    for (std::size_t t = 0; t < length; ++t) {
      const double td = static_cast<double>(t);
      exo.tfp[i][t] = a;
      a *= 1.0 + g.tfp_growth * std::pow(1.0 - g.tfp_growth_decline, td);
      exo.labor[i][t] = g.labor_asymptote + (g.labor_initial - g.labor_asymptote) *
                                                std::pow(1.0 - g.labor_convergence, td);
      exo.sigma[i][t] = g.sigma_initial * std::pow(1.0 - g.sigma_decline, td);
      exo.e_land[i][t] = g.e_land_initial * std::pow(1.0 - g.e_land_decline, td);
    }
  }
  exo.f_ex.resize(length);
  const auto& f = spec.forcing;
  for (std::size_t t = 0; t < length; ++t) {
    const double share =
        f.ramp_steps <= 0 ? 1.0
                          : std::min(static_cast<double>(t) / f.ramp_steps, 1.0);
    exo.f_ex[t] = f.start + (f.end - f.start) * share;
  }
  return exo;
}

std::string_view to_string(Cluster c) {
  return c == Cluster::developed ? "developed" : "developing";
}

std::vector<std::size_t> Scenario::cluster_members(Cluster c) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < clusters.size(); ++i)
    if (clusters[i] == c) out.push_back(i);
  return out;
}

ControlProfile constant_profile(const Scenario& scenario, double s, double mu) {
  return ControlProfile(scenario.region_count(), scenario.steps(), RegionControl{s, mu});
}

std::vector<double> negishi_weights(const Scenario& scenario) {
  const auto baseline = constant_profile(scenario, kNegishiReferenceSaving, 0.0);
  const auto traj = simulate(scenario.x0, baseline, scenario.model);
  const std::size_t n = scenario.region_count();
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double alpha = scenario.model.regions[i].alpha;
    double mean_mu = 0;
    for (std::size_t t = 0; t < traj.size(); ++t) {
      const double l = scenario.model.exo.labor[i][t];
      mean_mu += std::pow(per_capita_consumption(traj.steps[t].consumption[i], l), -alpha);
    }
    mean_mu /= static_cast<double>(traj.size());
    w[i] = 1.0 / mean_mu;
  }
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  for (double& c : w) c /= total;
  return w;
}

namespace {

bool finite_all(const std::vector<std::vector<double>>& m) {
  for (const auto& row : m)
    for (double v : row)
      if (!std::isfinite(v)) return false;
  return true;
}

bool in_unit_open(double v) { return v > 0 && v < 1; }
bool is_rate(double v) { return v >= 0 && v < 1; }

void validate_geo(const GeoParams& g, std::vector<std::string>& out) {
  const Mat3 phi = g.carbon_matrix();
  bool negative = false;
  for (const auto& row : phi)
    for (double v : row) negative |= v < 0 || !std::isfinite(v);
  if (negative) out.push_back("geo: carbon matrix has a negative or non-finite coefficient");
  for (int col = 0; col < 3; ++col) {
    const double sum = phi[0][col] + phi[1][col] + phi[2][col];
    if (!(std::abs(sum - 1.0) <= 1e-6))
      out.push_back(fmt::format("geo: carbon matrix column {} sums to {} (must be 1)", col + 1, sum));
  }
  if (!(g.eta > 0)) out.push_back("geo: eta must be positive");
  if (!(g.m_at_1750 > 0)) out.push_back("geo: m_at_1750 must be positive");
  if (!(g.xi1 > 0)) out.push_back("geo: xi1 must be positive");
  if (!(g.xi2 > 0)) out.push_back("geo: xi2 must be positive");
  if (!in_unit_open(g.phi11)) out.push_back("geo: phi11 must lie in (0, 1)");
  if (!in_unit_open(g.phi22)) out.push_back("geo: phi22 must lie in (0, 1)");
}

void validate_region(const Scenario& s, std::size_t i, std::vector<std::string>& out) {
  const auto& p = s.model.regions[i];
  const std::string tag = "region " + (i < s.region_names.size() ? s.region_names[i] : std::to_string(i));
  if (!in_unit_open(p.gamma)) out.push_back(tag + ": gamma must lie in (0, 1)");
  if (!in_unit_open(p.delta_k)) out.push_back(tag + ": delta_k must lie in (0, 1)");
  if (!(p.alpha > 0)) out.push_back(tag + ": alpha must be positive");
  if (!(p.rho > 0)) out.push_back(tag + ": rho must be positive");
  if (!(p.theta2 > 1)) out.push_back(tag + ": theta2 must exceed 1");
  if (!(p.pb > 0)) out.push_back(tag + ": backstop price must be positive");
  if (!is_rate(p.delta_pb)) out.push_back(tag + ": delta_pb must lie in [0, 1)");
  if (!(p.a1 >= 0 && p.a2 >= 0 && p.a3 > 0))
    out.push_back(tag + ": damage coefficients must be nonnegative with a3 > 0");
  if (i < s.damage_loss_at_2c.size() && s.damage_loss_at_2c[i]) {
    const double loss = *s.damage_loss_at_2c[i];
    const double omega2 = 1.0 - p.a1 * 2.0 - p.a2 * std::pow(2.0, p.a3);
    if (!(std::abs(omega2 - (1.0 - loss)) <= 1e-9))
      out.push_back(tag + ": damage coefficients do not reproduce the 2 degC loss");
  }
}

void validate_growth(const Scenario& s, std::vector<std::string>& out) {
  if (s.growth.regions.size() != s.region_count()) {
    out.push_back("exogenous: one growth specification per region required");
    return;
  }
  for (std::size_t i = 0; i < s.growth.regions.size(); ++i) {
    const auto& g = s.growth.regions[i];
    const std::string tag = "exogenous region " + std::to_string(i);
    if (!(is_rate(g.tfp_growth) && is_rate(g.tfp_growth_decline) && is_rate(g.labor_convergence) &&
          is_rate(g.sigma_decline) && is_rate(g.e_land_decline)))
      out.push_back(tag + ": growth and decay rates must lie in [0, 1)");
    if (!(g.labor_asymptote >= 0)) out.push_back(tag + ": asymptotic population must be nonnegative");
  }
  if (s.growth.forcing.ramp_steps < 0) out.push_back("exogenous: forcing ramp must be nonnegative");
}

void validate_paths(const Scenario& s, std::vector<std::string>& out) {
  const auto& e = s.model.exo;
  const std::size_t n = s.region_count();
  if (e.tfp.size() != n || e.labor.size() != n || e.sigma.size() != n || e.e_land.size() != n) {
    out.push_back("exogenous: paths must cover every region");
    return;
  }
  if (e.length() < s.steps())
    out.push_back(fmt::format("exogenous: path length {} shorter than horizon + 1 = {}",
                              e.length(), s.steps()));
  bool rect = true;
  for (std::size_t i = 0; i < n; ++i)
    rect &= e.tfp[i].size() == e.length() && e.labor[i].size() == e.length() &&
            e.sigma[i].size() == e.length() && e.e_land[i].size() == e.length();
  if (!rect) {
    out.push_back("exogenous: paths are not rectangular");
    return;
  }
  bool finite = finite_all(e.tfp) && finite_all(e.labor) && finite_all(e.sigma) && finite_all(e.e_land);
  for (double v : e.f_ex) finite &= std::isfinite(v);
  if (!finite) out.push_back("exogenous: non-finite entry");
  bool positive = true, nonneg = true;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t t = 0; t < e.length(); ++t) {
      positive &= e.tfp[i][t] > 0 && e.labor[i][t] > 0;
      nonneg &= e.sigma[i][t] >= 0 && e.e_land[i][t] >= 0;
    }
  if (!positive) out.push_back("exogenous: TFP and labor must be strictly positive");
  if (!nonneg) out.push_back("exogenous: sigma and land emissions must be nonnegative");
}

// The twelve-region layout must use the developed/developing split of the
// RICE regions: US, EU, Japan and other high income countries are developed.
void validate_clusters(const Scenario& s, std::vector<std::string>& out) {
  const std::size_t n = s.region_count();
  if (s.region_names.size() != n || s.clusters.size() != n) {
    out.push_back("regions: every region needs a name and a cluster label");
    return;
  }
  static const std::vector<std::string> kRice = {"US", "EU", "Japan", "Russia", "Eurasia", "China",
                                                 "India", "MidEast", "Africa", "LatAm", "OHI", "OthAsia"};
  if (s.region_names != kRice) return;
  for (std::size_t i = 0; i < n; ++i) {
    const bool developed = i == 0 || i == 1 || i == 2 || i == 10;
    if ((s.clusters[i] == Cluster::developed) != developed)
      out.push_back("regions: " + s.region_names[i] + " has the wrong cluster label");
  }
}

}  // namespace

std::vector<std::string> validate_scenario(const Scenario& s) {
  std::vector<std::string> out;
  const std::size_t n = s.region_count();
  if (n == 0) {
    out.push_back("regions: at least one region required");
    return out;
  }
  validate_geo(s.model.geo, out);
  for (std::size_t i = 0; i < n; ++i) validate_region(s, i, out);
  validate_clusters(s, out);
  validate_growth(s, out);
  validate_paths(s, out);

  if (s.horizon < 0) out.push_back("horizon must be nonnegative");

  const auto& x = s.x0;
  if (!(x.m_at > 0 && x.m_up > 0 && x.m_lo > 0))
    out.push_back("initial_state: carbon stocks must be positive");
  if (!(std::isfinite(x.t_at) && std::isfinite(x.t_lo)))
    out.push_back("initial_state: temperatures must be finite");
  if (x.capital.size() != n) {
    out.push_back("initial_state: one capital stock per region required");
  } else {
    for (double k : x.capital)
      if (!(k > 0)) {
        out.push_back("initial_state: capital must be positive");
        break;
      }
  }

  if (s.weights.size() != n) {
    out.push_back("weights: one weight per region required");
  } else {
    bool positive = true;
    double sum = 0;
    for (double c : s.weights) {
      positive &= c > 0;
      sum += c;
    }
    if (!positive || !(std::abs(sum - 1.0) <= 1e-9))
      out.push_back(fmt::format("weights: must be positive and sum to 1 (sum = {})", sum));
  }

  const auto& b = s.bounds;
  if (!(0 <= b.s_lower && b.s_lower <= b.s_upper && b.s_upper <= 1))
    out.push_back("bounds: saving-rate bounds must satisfy 0 <= lower <= upper <= 1");
  if (!(0 <= b.mu_lower && b.mu_lower <= b.mu_upper && b.mu_upper <= 1))
    out.push_back("bounds: emission-reduction bounds must satisfy 0 <= lower <= upper <= 1");
  return out;
}

Scenario build_default_scenario() {
  Scenario s = parse_scenario(embedded_default_scenario());
  if (auto v = validate_scenario(s); !v.empty()) throw ValidationError(std::move(v));
  return s;
}

}  // namespace rice
