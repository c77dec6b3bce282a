#pragma once

// Deterministic CSV/JSON output. Floating point is written with 17
// significant digits so every value round-trips exactly.

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rice/calibration.hpp"
#include "rice/cooperative.hpp"
#include "rice/noncooperative.hpp"

namespace rice {

inline constexpr std::string_view kToolVersion = "1.0.0";
inline constexpr double kDefaultSccPulse = 0.01;  // GtCO2/year

std::string format_double(double v);

// Columns: year, state (t_at, t_lo, m_at, m_up, m_lo, capital per region),
// per region (s, mu, Y, Q, C, Lambda, Omega), then E and F. One row per state;
// the terminal row leaves controls and step signals blank.
std::string trajectory_csv(const Scenario& scenario, const Trajectory& traj,
                           const ControlProfile& profile);

struct SccRow {
  int year = 0;
  std::string region;
  double scc = 0;  // USD/tCO2
};

std::vector<SccRow> scc_table(const Scenario& scenario, const ControlProfile& profile,
                              const std::vector<int>& steps, double eps = kDefaultSccPulse);
std::string scc_csv(const std::vector<SccRow>& rows);

std::string frontier_csv(const ParetoFrontier& frontier);
std::string episodes_csv(const Scenario& scenario, const EpisodeLog& log);
std::string certificate_csv(const Scenario& scenario, const NeCertificate& cert);
std::string solver_log_csv(const SolveReport& report);

// Writes text to path, creating parent directories. Errors name the path.
void write_text(const std::filesystem::path& path, std::string_view text);

void write_trajectory_csv(const Scenario& scenario, const Trajectory& traj,
                          const ControlProfile& profile, const std::filesystem::path& path);
void write_scc_table(const Scenario& scenario, const ControlProfile& profile,
                     const std::vector<int>& steps, const std::filesystem::path& path,
                     double eps = kDefaultSccPulse);

std::string sha256_hex(std::string_view data);

struct RunManifest {
  std::string subcommand;
  std::string scenario_source;  // file path or "embedded-default"
  std::string scenario_sha256;  // of the canonical serialized scenario
  std::vector<std::pair<std::string, std::string>> options;
  std::string tool_version{kToolVersion};

  std::string to_json() const;
};

}  // namespace rice
