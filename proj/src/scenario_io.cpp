#include "rice/scenario_io.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "rice/errors.hpp"

namespace rice {

using json = nlohmann::ordered_json;

namespace {

class Reader {
 public:
  void require_object(const json& j, std::string_view where) {
    if (!j.is_object()) fail(std::string(where) + ": expected an object");
  }

  // Rejects keys outside `allowed`, reports missing `required` keys.
  void check_keys(const json& j, std::string_view where, const std::set<std::string>& allowed,
                  const std::set<std::string>& required) {
    for (const auto& [key, _] : j.items())
      if (!allowed.contains(key)) fail(std::string(where) + ": unknown key '" + key + "'");
    for (const auto& key : required)
      if (!j.contains(key)) fail(std::string(where) + ": missing key '" + key + "'");
  }

  double number(const json& j, const std::string& key, std::string_view where) {
    const auto& v = j.at(key);
    if (!v.is_number()) fail(std::string(where) + "." + key + ": expected a number");
    return v.get<double>();
  }

  int integer(const json& j, const std::string& key, std::string_view where) {
    const auto& v = j.at(key);
    if (!v.is_number_integer()) fail(std::string(where) + "." + key + ": expected an integer");
    return v.get<int>();
  }

  std::string string(const json& j, const std::string& key, std::string_view where) {
    const auto& v = j.at(key);
    if (!v.is_string()) fail(std::string(where) + "." + key + ": expected a string");
    return v.get<std::string>();
  }

  std::vector<double> numbers(const json& j, const std::string& key, std::string_view where) {
    const auto& v = j.at(key);
    if (!v.is_array()) fail(std::string(where) + "." + key + ": expected an array");
    std::vector<double> out;
    for (const auto& e : v) {
      if (!e.is_number()) fail(std::string(where) + "." + key + ": expected numbers");
      out.push_back(e.get<double>());
    }
    return out;
  }

  [[noreturn]] void fail(std::string msg) { throw ValidationError({std::move(msg)}); }
};

const std::set<std::string> kGeoKeys = {
    "zeta11", "zeta12", "zeta21", "zeta22", "zeta23", "zeta32", "zeta33",
    "xi1_gtc_per_gtco2_per_year", "phi11", "phi12", "phi21", "phi22",
    "xi2_degc_per_w_m2", "eta_w_m2_per_doubling", "m_at_1750_gtc"};

GeoParams parse_geo(Reader& r, const json& j) {
  r.require_object(j, "geo");
  r.check_keys(j, "geo", kGeoKeys, kGeoKeys);
  GeoParams g;
  g.zeta11 = r.number(j, "zeta11", "geo");
  g.zeta12 = r.number(j, "zeta12", "geo");
  g.zeta21 = r.number(j, "zeta21", "geo");
  g.zeta22 = r.number(j, "zeta22", "geo");
  g.zeta23 = r.number(j, "zeta23", "geo");
  g.zeta32 = r.number(j, "zeta32", "geo");
  g.zeta33 = r.number(j, "zeta33", "geo");
  g.xi1 = r.number(j, "xi1_gtc_per_gtco2_per_year", "geo");
  g.phi11 = r.number(j, "phi11", "geo");
  g.phi12 = r.number(j, "phi12", "geo");
  g.phi21 = r.number(j, "phi21", "geo");
  g.phi22 = r.number(j, "phi22", "geo");
  g.xi2 = r.number(j, "xi2_degc_per_w_m2", "geo");
  g.eta = r.number(j, "eta_w_m2_per_doubling", "geo");
  g.m_at_1750 = r.number(j, "m_at_1750_gtc", "geo");
  return g;
}

json geo_json(const GeoParams& g) {
  return {{"zeta11", g.zeta11},
          {"zeta12", g.zeta12},
          {"zeta21", g.zeta21},
          {"zeta22", g.zeta22},
          {"zeta23", g.zeta23},
          {"zeta32", g.zeta32},
          {"zeta33", g.zeta33},
          {"xi1_gtc_per_gtco2_per_year", g.xi1},
          {"phi11", g.phi11},
          {"phi12", g.phi12},
          {"phi21", g.phi21},
          {"phi22", g.phi22},
          {"xi2_degc_per_w_m2", g.xi2},
          {"eta_w_m2_per_doubling", g.eta},
          {"m_at_1750_gtc", g.m_at_1750}};
}

const std::set<std::string> kRegionRequired = {
    "name", "cluster", "gamma", "delta_k_per_year", "alpha", "rho_per_year", "theta2",
    "backstop_price_usd_per_tco2", "backstop_decline_per_step"};

struct ParsedRegion {
  std::string name;
  Cluster cluster;
  RegionParams params;
  std::optional<double> loss;
};

ParsedRegion parse_region(Reader& r, const json& j, std::size_t index) {
  const std::string where = "regions[" + std::to_string(index) + "]";
  r.require_object(j, where);
  auto allowed = kRegionRequired;
  allowed.insert({"damage_loss_at_2degc_fraction", "damage"});
  r.check_keys(j, where, allowed, kRegionRequired);
  ParsedRegion out;
  out.name = r.string(j, "name", where);
  const auto cluster = r.string(j, "cluster", where);
  if (cluster == "developed") out.cluster = Cluster::developed;
  else if (cluster == "developing") out.cluster = Cluster::developing;
  else r.fail(where + ".cluster: expected 'developed' or 'developing'");
  auto& p = out.params;
  p.gamma = r.number(j, "gamma", where);
  p.delta_k = r.number(j, "delta_k_per_year", where);
  p.alpha = r.number(j, "alpha", where);
  p.rho = r.number(j, "rho_per_year", where);
  p.theta2 = r.number(j, "theta2", where);
  p.pb = r.number(j, "backstop_price_usd_per_tco2", where);
  p.delta_pb = r.number(j, "backstop_decline_per_step", where);

  const bool has_loss = j.contains("damage_loss_at_2degc_fraction");
  const bool has_coeffs = j.contains("damage");
  if (has_loss == has_coeffs)
    r.fail(where + ": give exactly one of 'damage_loss_at_2degc_fraction' or 'damage'");
  if (has_loss) {
    out.loss = r.number(j, "damage_loss_at_2degc_fraction", where);
    if (!(*out.loss > 0 && *out.loss < 1))
      r.fail(where + ".damage_loss_at_2degc_fraction: must lie in (0, 1)");
    const auto d = calibrate_damage(*out.loss);
    p.a1 = d.a1;
    p.a2 = d.a2;
    p.a3 = d.a3;
  } else {
    const auto& d = j.at("damage");
    const std::string dw = where + ".damage";
    r.require_object(d, dw);
    r.check_keys(d, dw, {"a1", "a2", "a3"}, {"a1", "a2", "a3"});
    p.a1 = r.number(d, "a1", dw);
    p.a2 = r.number(d, "a2", dw);
    p.a3 = r.number(d, "a3", dw);
  }
  return out;
}

json region_json(const Scenario& s, std::size_t i) {
  const auto& p = s.model.regions[i];
  json j = {{"name", s.region_names[i]},
            {"cluster", std::string(to_string(s.clusters[i]))},
            {"gamma", p.gamma},
            {"delta_k_per_year", p.delta_k},
            {"alpha", p.alpha},
            {"rho_per_year", p.rho},
            {"theta2", p.theta2},
            {"backstop_price_usd_per_tco2", p.pb},
            {"backstop_decline_per_step", p.delta_pb}};
  if (i < s.damage_loss_at_2c.size() && s.damage_loss_at_2c[i])
    j["damage_loss_at_2degc_fraction"] = *s.damage_loss_at_2c[i];
  else
    j["damage"] = {{"a1", p.a1}, {"a2", p.a2}, {"a3", p.a3}};
  return j;
}

const std::set<std::string> kGrowthKeys = {
    "tfp_initial", "tfp_growth_per_step", "tfp_growth_decline_per_step",
    "labor_initial_millions", "labor_asymptote_millions", "labor_convergence_per_step",
    "sigma_initial_gtco2_per_trillion_usd", "sigma_decline_per_step",
    "e_land_initial_gtco2_per_year", "e_land_decline_per_step"};

RegionGrowthSpec parse_growth(Reader& r, const json& j, std::size_t index) {
  const std::string where = "exogenous.regions[" + std::to_string(index) + "]";
  r.require_object(j, where);
  r.check_keys(j, where, kGrowthKeys, kGrowthKeys);
  RegionGrowthSpec g;
  g.tfp_initial = r.number(j, "tfp_initial", where);
  g.tfp_growth = r.number(j, "tfp_growth_per_step", where);
  g.tfp_growth_decline = r.number(j, "tfp_growth_decline_per_step", where);
  g.labor_initial = r.number(j, "labor_initial_millions", where);
  g.labor_asymptote = r.number(j, "labor_asymptote_millions", where);
  g.labor_convergence = r.number(j, "labor_convergence_per_step", where);
  g.sigma_initial = r.number(j, "sigma_initial_gtco2_per_trillion_usd", where);
  g.sigma_decline = r.number(j, "sigma_decline_per_step", where);
  g.e_land_initial = r.number(j, "e_land_initial_gtco2_per_year", where);
  g.e_land_decline = r.number(j, "e_land_decline_per_step", where);
  return g;
}

json growth_json(const RegionGrowthSpec& g) {
  return {{"tfp_initial", g.tfp_initial},
          {"tfp_growth_per_step", g.tfp_growth},
          {"tfp_growth_decline_per_step", g.tfp_growth_decline},
          {"labor_initial_millions", g.labor_initial},
          {"labor_asymptote_millions", g.labor_asymptote},
          {"labor_convergence_per_step", g.labor_convergence},
          {"sigma_initial_gtco2_per_trillion_usd", g.sigma_initial},
          {"sigma_decline_per_step", g.sigma_decline},
          {"e_land_initial_gtco2_per_year", g.e_land_initial},
          {"e_land_decline_per_step", g.e_land_decline}};
}

Scenario parse_json(Reader& r, const json& root) {
  r.require_object(root, "scenario");
  const std::set<std::string> top = {"schema_version", "name", "horizon_steps", "geo", "regions",
                                     "exogenous", "initial_state", "weights", "bounds"};
  r.check_keys(root, "scenario", top, top);
  const int version = r.integer(root, "schema_version", "scenario");
  if (version != kScenarioSchemaVersion)
    r.fail("scenario.schema_version: unsupported version " + std::to_string(version));

  Scenario s;
  s.name = r.string(root, "name", "scenario");
  s.horizon = r.integer(root, "horizon_steps", "scenario");
  s.model.geo = parse_geo(r, root.at("geo"));

  const auto& regions = root.at("regions");
  if (!regions.is_array() || regions.empty()) r.fail("regions: expected a non-empty array");
  for (std::size_t i = 0; i < regions.size(); ++i) {
    auto pr = parse_region(r, regions[i], i);
    s.region_names.push_back(std::move(pr.name));
    s.clusters.push_back(pr.cluster);
    s.model.regions.push_back(pr.params);
    s.damage_loss_at_2c.push_back(pr.loss);
  }
  const std::size_t n = s.model.regions.size();

  const auto& exo = root.at("exogenous");
  r.require_object(exo, "exogenous");
  r.check_keys(exo, "exogenous", {"path_length_steps", "forcing", "regions"},
               {"path_length_steps", "forcing", "regions"});
  const int length = r.integer(exo, "path_length_steps", "exogenous");
  if (length < 1) r.fail("exogenous.path_length_steps: must be at least 1");
  s.path_length = static_cast<std::size_t>(length);
  const auto& f = exo.at("forcing");
  r.require_object(f, "exogenous.forcing");
  r.check_keys(f, "exogenous.forcing", {"start_w_m2", "end_w_m2", "ramp_steps"},
               {"start_w_m2", "end_w_m2", "ramp_steps"});
  s.growth.forcing.start = r.number(f, "start_w_m2", "exogenous.forcing");
  s.growth.forcing.end = r.number(f, "end_w_m2", "exogenous.forcing");
  s.growth.forcing.ramp_steps = r.integer(f, "ramp_steps", "exogenous.forcing");
  const auto& gr = exo.at("regions");
  if (!gr.is_array() || gr.size() != n)
    r.fail("exogenous.regions: expected one entry per region");
  for (std::size_t i = 0; i < n; ++i) s.growth.regions.push_back(parse_growth(r, gr[i], i));
  s.model.exo = generate_exogenous(s.growth, s.path_length);

  const auto& x = root.at("initial_state");
  const std::set<std::string> xkeys = {"t_at_degc", "t_lo_degc", "m_at_gtc", "m_up_gtc",
                                       "m_lo_gtc", "capital_trillion_usd"};
  r.require_object(x, "initial_state");
  r.check_keys(x, "initial_state", xkeys, xkeys);
  s.x0.t_at = r.number(x, "t_at_degc", "initial_state");
  s.x0.t_lo = r.number(x, "t_lo_degc", "initial_state");
  s.x0.m_at = r.number(x, "m_at_gtc", "initial_state");
  s.x0.m_up = r.number(x, "m_up_gtc", "initial_state");
  s.x0.m_lo = r.number(x, "m_lo_gtc", "initial_state");
  s.x0.capital = r.numbers(x, "capital_trillion_usd", "initial_state");

  const auto& b = root.at("bounds");
  const std::set<std::string> bkeys = {"s_lower", "s_upper", "mu_lower", "mu_upper"};
  r.require_object(b, "bounds");
  r.check_keys(b, "bounds", bkeys, bkeys);
  s.bounds.s_lower = r.number(b, "s_lower", "bounds");
  s.bounds.s_upper = r.number(b, "s_upper", "bounds");
  s.bounds.mu_lower = r.number(b, "mu_lower", "bounds");
  s.bounds.mu_upper = r.number(b, "mu_upper", "bounds");

  const auto& w = root.at("weights");
  r.require_object(w, "weights");
  r.check_keys(w, "weights", {"method", "values"}, {});
  if (w.contains("method") == w.contains("values"))
    r.fail("weights: give exactly one of 'method' or 'values'");
  if (w.contains("values")) {
    s.weights = r.numbers(w, "values", "weights");
  } else {
    if (r.string(w, "method", "weights") != "negishi")
      r.fail("weights.method: only 'negishi' is supported");
    s.weights = negishi_weights(s);
  }
  return s;
}

}  // namespace

Scenario parse_scenario(std::string_view text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError({std::string("scenario is not valid JSON: ") + e.what()});
  }
  Reader r;
  try {
    return parse_json(r, root);
  } catch (const json::exception& e) {
    throw ValidationError({std::string("scenario: ") + e.what()});
  }
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scenario file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

std::string serialize_scenario(const Scenario& s) {
  json regions = json::array();
  json growth = json::array();
  for (std::size_t i = 0; i < s.region_count(); ++i) {
    regions.push_back(region_json(s, i));
    growth.push_back(growth_json(s.growth.regions.at(i)));
  }
  json root = {
      {"schema_version", kScenarioSchemaVersion},
      {"name", s.name},
      {"horizon_steps", s.horizon},
      {"geo", geo_json(s.model.geo)},
      {"regions", regions},
      {"exogenous",
       {{"path_length_steps", s.path_length},
        {"forcing",
         {{"start_w_m2", s.growth.forcing.start},
          {"end_w_m2", s.growth.forcing.end},
          {"ramp_steps", s.growth.forcing.ramp_steps}}},
        {"regions", growth}}},
      {"initial_state",
       {{"t_at_degc", s.x0.t_at},
        {"t_lo_degc", s.x0.t_lo},
        {"m_at_gtc", s.x0.m_at},
        {"m_up_gtc", s.x0.m_up},
        {"m_lo_gtc", s.x0.m_lo},
        {"capital_trillion_usd", s.x0.capital}}},
      {"weights", {{"values", s.weights}}},
      {"bounds",
       {{"s_lower", s.bounds.s_lower},
        {"s_upper", s.bounds.s_upper},
        {"mu_lower", s.bounds.mu_lower},
        {"mu_upper", s.bounds.mu_upper}}}};
  return root.dump(2) + "\n";
}

}  // namespace rice
