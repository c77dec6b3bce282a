#include "rice/report.hpp"

#include <fmt/format.h>
#include <fstream>
#include <stdexcept>

#include <json.hpp>
#include <openssl/evp.h>

namespace rice {

std::string format_double(double v) { return fmt::format("{:.17g}", v); }

namespace {

void row(std::string& out, const std::vector<std::string>& cells) {
  for (std::size_t k = 0; k < cells.size(); ++k) {
    if (k) out += ',';
    out += cells[k];
  }
  out += '\n';
}

}  // namespace

std::string trajectory_csv(const Scenario& scenario, const Trajectory& traj,
                           const ControlProfile& profile) {
  const std::size_t n = scenario.region_count();
  if (profile.steps() != traj.size() || profile.regions() != n)
    throw std::invalid_argument("trajectory_csv: profile does not match the trajectory");
  std::vector<std::string> header{"year", "t_at_degc", "t_lo_degc", "m_at_gtc", "m_up_gtc",
                                  "m_lo_gtc"};
  for (const auto& name : scenario.region_names) header.push_back("k_" + name + "_trillion_usd");
  for (const auto& name : scenario.region_names) {
    header.push_back("s_" + name);
    header.push_back("mu_" + name);
    header.push_back("y_" + name + "_trillion_usd");
    header.push_back("q_" + name + "_trillion_usd");
    header.push_back("c_" + name + "_trillion_usd");
    header.push_back("lambda_" + name);
    header.push_back("omega_" + name);
  }
  header.push_back("e_gtco2_per_year");
  header.push_back("f_w_m2");
  std::string out;
  row(out, header);

  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    const auto& x = traj.states[k];
    std::vector<std::string> cells{std::to_string(year_of_step(traj.start_step + static_cast<int>(k))),
                                   format_double(x.t_at), format_double(x.t_lo),
                                   format_double(x.m_at), format_double(x.m_up),
                                   format_double(x.m_lo)};
    for (double c : x.capital) cells.push_back(format_double(c));
    const bool has_step = k < traj.size();
    for (std::size_t i = 0; i < n; ++i) {
      if (!has_step) {
        cells.insert(cells.end(), 7, "");
        continue;
      }
      const auto& d = traj.steps[k];
      cells.push_back(format_double(profile.at(i, k).s));
      cells.push_back(format_double(profile.at(i, k).mu));
      cells.push_back(format_double(d.gross_output[i]));
      cells.push_back(format_double(d.net_output[i]));
      cells.push_back(format_double(d.consumption[i]));
      cells.push_back(format_double(d.abatement[i]));
      cells.push_back(format_double(d.damage[i]));
    }
    cells.push_back(has_step ? format_double(traj.steps[k].total_emissions) : "");
    cells.push_back(has_step ? format_double(traj.steps[k].forcing) : "");
    row(out, cells);
  }
  return out;
}

std::vector<SccRow> scc_table(const Scenario& scenario, const ControlProfile& profile,
                              const std::vector<int>& steps, double eps) {
  std::vector<SccRow> rows;
  for (int t : steps)
    for (std::size_t i = 0; i < scenario.region_count(); ++i)
      rows.push_back({year_of_step(t), scenario.region_names[i],
                      social_cost_of_co2(scenario.x0, profile, scenario.model, i, t, eps)});
  return rows;
}

std::string scc_csv(const std::vector<SccRow>& rows) {
  std::string out = "year,region,scc_usd_per_tco2\n";
  for (const auto& r : rows) row(out, {std::to_string(r.year), r.region, format_double(r.scc)});
  return out;
}

std::string frontier_csv(const ParetoFrontier& frontier) {
  std::string out = "p,w_developed_utils,w_developing_utils,t_at_final_degc\n";
  for (const auto& pt : frontier.points)
    row(out, {format_double(pt.p), format_double(pt.w_developed), format_double(pt.w_developing),
              format_double(pt.t_at_final)});
  return out;
}

std::string episodes_csv(const Scenario& scenario, const EpisodeLog& log) {
  std::vector<std::string> header{"episode", "distance_inf", "distance_2"};
  for (const auto& name : scenario.region_names) header.push_back("j_" + name + "_utils");
  std::string out;
  row(out, header);
  for (std::size_t k = 0; k < log.episodes.size(); ++k) {
    const auto& ep = log.episodes[k];
    std::vector<std::string> cells{std::to_string(k + 1), format_double(ep.distance_inf),
                                   format_double(ep.distance_2)};
    for (double j : ep.welfares) cells.push_back(format_double(j));
    row(out, cells);
  }
  return out;
}

std::string certificate_csv(const Scenario& scenario, const NeCertificate& cert) {
  std::string out = "region,welfare_candidate_utils,welfare_deviation_utils,relative_gain\n";
  for (std::size_t i = 0; i < cert.relative_gain.size(); ++i)
    row(out, {scenario.region_names[i], format_double(cert.welfare_candidate[i]),
              format_double(cert.welfare_deviation[i]), format_double(cert.relative_gain[i])});
  return out;
}

std::string solver_log_csv(const SolveReport& report) {
  std::string out = "iteration,objective\n";
  for (std::size_t k = 0; k < report.objective_log.size(); ++k)
    row(out, {std::to_string(k), format_double(report.objective_log[k])});
  return out;
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw std::runtime_error(fmt::format("{}: {}", path.parent_path().string(), ec.message()));
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(fmt::format("{}: cannot open for writing", path.string()));
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw std::runtime_error(fmt::format("{}: write failed", path.string()));
}

void write_trajectory_csv(const Scenario& scenario, const Trajectory& traj,
                          const ControlProfile& profile, const std::filesystem::path& path) {
  write_text(path, trajectory_csv(scenario, traj, profile));
}

void write_scc_table(const Scenario& scenario, const ControlProfile& profile,
                     const std::vector<int>& steps, const std::filesystem::path& path, double eps) {
  write_text(path, scc_csv(scc_table(scenario, profile, steps, eps)));
}

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (!EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr))
    throw std::runtime_error("sha256 failed");
  std::string hex;
  for (unsigned int k = 0; k < len; ++k) hex += fmt::format("{:02x}", digest[k]);
  return hex;
}

std::string RunManifest::to_json() const {
  nlohmann::ordered_json opts = nlohmann::ordered_json::object();
  for (const auto& [k, v] : options) opts[k] = v;
  nlohmann::ordered_json j = {{"subcommand", subcommand},
                              {"scenario", scenario_source},
                              {"scenario_sha256", scenario_sha256},
                              {"options", opts},
                              {"tool_version", tool_version}};
  return j.dump(2) + "\n";
}

}  // namespace rice
