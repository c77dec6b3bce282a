#pragma once

// RICE dynamics on a 5-year grid: three-reservoir carbon cycle, two-layer
// temperature model, regional Cobb-Douglas economies, and the regional
// welfare payoffs that turn the model into an n-player dynamic game.
//
// Units: carbon stocks GtC, emissions GtCO2/year, money trillions of 2005 USD,
// population millions, temperatures degC above 1750, SCC USD/tCO2.

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace rice {

inline constexpr int kYearsPerStep = 5;
inline constexpr int kBaseYear = 2020;
// Utility is evaluated on per-capita consumption in thousand USD per person:
// trillion USD over millions of people, times 1000.
inline constexpr double kBillionPerTrillion = 1000.0;
inline constexpr double kPerCapitaConsumptionFloor = 1e-6;  // thousand USD/person

constexpr int year_of_step(int t) { return kBaseYear + kYearsPerStep * t; }

using Vec2 = std::array<double, 2>;
using Vec3 = std::array<double, 3>;
using Mat3 = std::array<std::array<double, 3>, 3>;

struct GeoParams {
  // Carbon transition coefficients (per step).
  double zeta11 = 0, zeta12 = 0, zeta21 = 0, zeta22 = 0, zeta23 = 0,
         zeta32 = 0, zeta33 = 0;
  double xi1 = 0;  // GtC added to the atmosphere per GtCO2/year over a step
  // Temperature transition coefficients (per step).
  double phi11 = 0, phi12 = 0, phi21 = 0, phi22 = 0;
  double xi2 = 0;        // degC per W/m^2 per step
  double eta = 0;        // W/m^2 per doubling of atmospheric carbon
  double m_at_1750 = 0;  // GtC

  Mat3 carbon_matrix() const;

  bool operator==(const GeoParams&) const = default;
};

struct RegionParams {
  double gamma = 0.3;    // capital elasticity
  double delta_k = 0.1;  // capital depreciation per year
  double alpha = 1.5;    // elasticity of marginal utility
  double rho = 0.015;    // pure time preference per year
  double a1 = 0, a2 = 0, a3 = 2;  // damage coefficients
  double theta2 = 2.8;            // abatement cost exponent
  double pb = 0;                  // backstop price at step 0, USD/tCO2
  double delta_pb = 0;            // backstop price decline per step

  bool operator==(const RegionParams&) const = default;
};

// Exogenous signals, indexed [region][step] (f_ex by step only).
struct ExogenousPaths {
  std::vector<std::vector<double>> tfp;
  std::vector<std::vector<double>> labor;   // millions
  std::vector<std::vector<double>> sigma;   // GtCO2 per trillion USD
  std::vector<std::vector<double>> e_land;  // GtCO2/year
  std::vector<double> f_ex;                 // W/m^2

  std::size_t regions() const { return tfp.size(); }
  std::size_t length() const { return f_ex.size(); }

  bool operator==(const ExogenousPaths&) const = default;
};

// Everything the one-step map needs besides the state and controls.
struct ModelParams {
  GeoParams geo;
  std::vector<RegionParams> regions;
  ExogenousPaths exo;

  std::size_t region_count() const { return regions.size(); }

  bool operator==(const ModelParams&) const = default;
};

struct RiceState {
  double t_at = 0, t_lo = 0;          // degC
  double m_at = 0, m_up = 0, m_lo = 0;  // GtC
  std::vector<double> capital;        // trillion USD, one per region

  // Flat layout [t_at, t_lo, m_at, m_up, m_lo, K_1..K_n].
  std::vector<double> to_vector() const;
  static RiceState from_vector(std::span<const double> v);

  bool operator==(const RiceState&) const = default;
};

struct RegionControl {
  double s = 0;   // saving rate
  double mu = 0;  // emission-reduction rate

  bool operator==(const RegionControl&) const = default;
};

// Controls for every region over `steps` consecutive steps.
class ControlProfile {
 public:
  ControlProfile() = default;
  ControlProfile(std::size_t regions, std::size_t steps, RegionControl fill = {});

  std::size_t regions() const { return regions_; }
  std::size_t steps() const { return steps_; }

  RegionControl& at(std::size_t region, std::size_t t) {
    return data_[region * steps_ + t];
  }
  const RegionControl& at(std::size_t region, std::size_t t) const {
    return data_[region * steps_ + t];
  }
  std::vector<RegionControl> at_step(std::size_t t) const;

  ControlProfile prefix(std::size_t steps) const;

  bool operator==(const ControlProfile&) const = default;

 private:
  std::size_t regions_ = 0;
  std::size_t steps_ = 0;
  std::vector<RegionControl> data_;  // region-major
};

struct StepDiagnostics {
  std::vector<double> gross_output;  // Y
  std::vector<double> net_output;    // Q
  std::vector<double> consumption;   // C = (1 - s) Q, before flooring
  std::vector<double> emissions;     // sigma (1 - mu) Y + e_land
  std::vector<double> abatement;     // Lambda
  std::vector<double> damage;        // Omega
  std::vector<char> consumption_floored;
  double total_emissions = 0;  // E, GtCO2/year
  double forcing = 0;          // F, W/m^2

  bool operator==(const StepDiagnostics&) const = default;
};

struct Trajectory {
  int start_step = 0;
  std::vector<RiceState> states;        // steps.size() + 1 entries
  std::vector<StepDiagnostics> steps;

  std::size_t size() const { return steps.size(); }
  bool any_consumption_floored() const;

  bool operator==(const Trajectory&) const = default;
};

// Extra emissions injected into the carbon step at an absolute step.
struct EmissionPulse {
  int step = 0;
  double gtco2_per_year = 0;
};

double radiative_forcing(double m_at, double f_ex, const GeoParams& geo);
Vec3 step_carbon(const Vec3& m, double e_total, const GeoParams& geo);
Vec2 step_temperature(const Vec2& temp, double forcing, const GeoParams& geo);
double gross_output(double a, double k, double l, double gamma);
// Keeps the (t - 1) exponent for every t, so step 0 carries (1 - delta_pb)^-1.
double backstop_theta1(int t, const RegionParams& p, double sigma_t);
double abatement_fraction(double mu, double theta1, double theta2);
double damage_fraction(double t_at, const RegionParams& p);
double global_emissions(std::span<const double> outputs, std::span<const double> mus,
                        std::span<const double> sigma, std::span<const double> e_land);
double step_capital(double k, double s, double q_net, double delta_k);

struct StepResult {
  RiceState next;
  StepDiagnostics diagnostics;
};

// One application of the game dynamics at absolute step t.
StepResult step(int t, const RiceState& x, std::span<const RegionControl> u,
                const ModelParams& model, double extra_emissions = 0);

// Folds `step` over the profile starting at absolute step `start_step`.
// Throws SimulationError carrying the failing step.
Trajectory simulate(const RiceState& x0, const ControlProfile& profile,
                    const ModelParams& model, int start_step = 0,
                    std::optional<EmissionPulse> pulse = std::nullopt);

// Per-capita consumption in thousand USD/person from C (trillion USD) and
// L (millions), floored at kPerCapitaConsumptionFloor.
double per_capita_consumption(double c, double l);

// Discounted population-weighted utility of per-capita consumption c / l at
// step t. Pass c in billions of USD and l in millions to get thousand USD per
// person, the unit the welfare functions use.
double utility(double c, double l, double alpha, double rho, int t);

double regional_welfare(const Trajectory& traj, const ModelParams& model,
                        std::size_t region);
std::vector<double> regional_welfares(const Trajectory& traj, const ModelParams& model);
double weighted_welfare(const Trajectory& traj, const ModelParams& model,
                        std::span<const double> weights);

// Regional social cost of CO2 at absolute step t, in USD/tCO2, by central
// differences of re-simulated welfare.
double social_cost_of_co2(const RiceState& x0, const ControlProfile& profile,
                          const ModelParams& model, std::size_t region, int t,
                          double eps);

}  // namespace rice
