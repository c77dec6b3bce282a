#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "rice/calibration.hpp"

namespace rice {

inline constexpr int kScenarioSchemaVersion = 1;

// JSON scenario files. Unknown keys and wrong types throw ValidationError;
// parsing does not check the model invariants (use validate_scenario).
// Weights given as {"method": "negishi"} are computed after parsing.
Scenario parse_scenario(std::string_view text);
Scenario load_scenario(const std::filesystem::path& path);

// Writes explicit weights, so parse(serialize(s)) == s.
std::string serialize_scenario(const Scenario& scenario);

}  // namespace rice
