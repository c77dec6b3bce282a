#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rice/model.hpp"

namespace rice {

struct DamageCoefficients {
  double a1 = 0, a2 = 0, a3 = 2;
  bool operator==(const DamageCoefficients&) const = default;
};

// Quadratic-only closure: a1 = 0, a3 = 2, a2 = loss / 4, so that the damage
// fraction at 2 degC equals 1 - loss.
DamageCoefficients calibrate_damage(double loss_at_2c);

// Generator parameters for one region's exogenous signals (all rates per step).
struct RegionGrowthSpec {
  double tfp_initial = 1;
  double tfp_growth = 0;          // initial per-step TFP growth rate
  double tfp_growth_decline = 0;  // geometric decay of that growth rate
  double labor_initial = 1;       // millions
  double labor_asymptote = 1;     // millions
  double labor_convergence = 0;   // share of the remaining gap closed per step
  double sigma_initial = 0;       // GtCO2 per trillion USD
  double sigma_decline = 0;
  double e_land_initial = 0;  // GtCO2/year
  double e_land_decline = 0;

  bool operator==(const RegionGrowthSpec&) const = default;
};

struct ForcingSpec {
  double start = 0;  // W/m^2 at step 0
  double end = 0;    // W/m^2 once the ramp completes
  int ramp_steps = 0;

  bool operator==(const ForcingSpec&) const = default;
};

struct ExogenousGrowthSpec {
  std::vector<RegionGrowthSpec> regions;
  ForcingSpec forcing;

  bool operator==(const ExogenousGrowthSpec&) const = default;
};

ExogenousPaths generate_exogenous(const ExogenousGrowthSpec& spec, std::size_t length);

struct ControlBounds {
  double s_lower = 0.05, s_upper = 0.95;
  double mu_lower = 0, mu_upper = 1;

  bool operator==(const ControlBounds&) const = default;
};

enum class Cluster { developed, developing };

std::string_view to_string(Cluster c);

struct Scenario {
  std::string name;
  std::vector<std::string> region_names;
  std::vector<Cluster> clusters;
  // Per region, the 2 degC output loss the damage coefficients were calibrated
  // from; empty when the coefficients were given directly.
  std::vector<std::optional<double>> damage_loss_at_2c;
  ExogenousGrowthSpec growth;
  std::size_t path_length = 0;
  ModelParams model;  // exo is generate_exogenous(growth, path_length)
  RiceState x0;
  int horizon = 0;  // controls act on steps 0..horizon
  std::vector<double> weights;
  ControlBounds bounds;

  std::size_t region_count() const { return model.region_count(); }
  std::size_t steps() const { return static_cast<std::size_t>(horizon) + 1; }
  std::vector<std::size_t> cluster_members(Cluster c) const;

  bool operator==(const Scenario&) const = default;
};

// No-abatement baseline (mu = 0, s = reference saving) over the scenario
// horizon; weights proportional to the inverse of each region's time-averaged
// marginal utility of consumption, normalized to sum to one.
inline constexpr double kNegishiReferenceSaving = 0.25;
std::vector<double> negishi_weights(const Scenario& scenario);

// Empty iff every invariant holds. Never throws on bad data.
std::vector<std::string> validate_scenario(const Scenario& scenario);

// Text of the scenario compiled into the library.
std::string_view embedded_default_scenario();

// Parses the embedded default, computes Negishi weights, and validates.
// Throws ValidationError listing every failure.
Scenario build_default_scenario();

// Baseline profile used by the Negishi weights and the `simulate` command.
ControlProfile constant_profile(const Scenario& scenario, double s, double mu);

}  // namespace rice
