#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "bikeshare/analysis.hpp"
#include "bikeshare/fixed_point.hpp"
#include "bikeshare/params.hpp"
#include "bikeshare/simulator.hpp"

namespace bikeshare {

using json = nlohmann::json;

/// Reads the keys lambda, mu, gamma, omega, capacity_c, capacity_k,
/// n_stations, delta. Missing keys keep their defaults; wrong types throw
/// ConfigError. The result is validated.
SystemParams params_from_json(const json& j);
json params_to_json(const SystemParams& p);

/// SystemParams plus seed, t_warmup, t_measure, sample_interval and the
/// optional flags record_trajectory, first_ride_includes_origin.
SimConfig sim_config_from_json(const json& j);

json to_json(const FixedPointResult& r);
json to_json(const Metrics& m);
json to_json(const EventCounts& c);
/// Scalars, event counts and time_avg_measure; the trajectory goes to CSV.
json to_json(const SimReport& r);
json to_json(const SweepRecord& r);

/// Parses a file into JSON; ConfigError if it is missing or malformed.
json load_json_file(const std::string& path);

/// Applies `key=value` strings on top of a JSON object. Values parse as JSON
/// when possible (numbers, arrays, booleans) and fall back to strings.
void apply_overrides(json& j, const std::vector<std::string>& overrides);

/// Writes `text` to `path`, replacing any existing file.
void write_text_file(const std::string& path, const std::string& text);

}  // namespace bikeshare
