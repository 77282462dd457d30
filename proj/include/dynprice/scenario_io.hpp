#pragma once

#include <string>
#include <string_view>

#include "dynprice/simulator.hpp"

namespace dynprice {

inline constexpr int scenario_schema_version = 1;

/// Parses a scenario document (format in docs/scenario.md). Throws InputError
/// naming the offending field path, or carrying line/column for syntax errors.
/// Semantic validation (Scenario::validate) is also applied and reported as
/// InputError.
Scenario parse_scenario(std::string_view text);

/// Reads and parses a scenario file.
Scenario load_scenario(const std::string& path);

/// Serializes a scenario; parse_scenario(dump_scenario(s)) reproduces s.
std::string dump_scenario(const Scenario& scenario);

}  // namespace dynprice
