#include "bikeshare/io.hpp"

#include <fstream>
#include <sstream>

#include "bikeshare/errors.hpp"

namespace bikeshare {

namespace {

template <class T>
void read_key(const json& j, const char* key, T& out) {
    if (!j.contains(key)) return;
    try {
        const json& v = j.at(key);
        if constexpr (std::is_integral_v<T>) {
            if (!v.is_number()) throw ConfigError(std::string("key '") + key + "' must be a number");
            const double d = v.get<double>();
            if (d != static_cast<double>(static_cast<T>(d)))
                throw ConfigError(std::string("key '") + key + "' must be an integer");
            out = static_cast<T>(d);
        } else {
            out = v.get<T>();
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("key '") + key + "': " + e.what());
    }
}

}  // namespace

SystemParams params_from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("parameter file must hold a JSON object");
    SystemParams p;
    read_key(j, "lambda", p.lambda);
    read_key(j, "mu", p.mu);
    read_key(j, "gamma", p.gamma);
    read_key(j, "omega", p.omega);
    read_key(j, "capacity_c", p.capacity_c);
    read_key(j, "capacity_k", p.capacity_k);
    read_key(j, "n_stations", p.n_stations);
    read_key(j, "delta", p.delta);
    p.validate();
    return p;
}

json params_to_json(const SystemParams& p) {
    return json{{"lambda", p.lambda},         {"mu", p.mu},
                {"gamma", p.gamma},           {"omega", p.omega},
                {"capacity_c", p.capacity_c}, {"capacity_k", p.capacity_k},
                {"n_stations", p.n_stations}, {"delta", p.delta}};
}

SimConfig sim_config_from_json(const json& j) {
    SimConfig c;
    c.params = params_from_json(j);
    read_key(j, "seed", c.seed);
    read_key(j, "t_warmup", c.t_warmup);
    read_key(j, "t_measure", c.t_measure);
    read_key(j, "sample_interval", c.sample_interval);
    read_key(j, "record_trajectory", c.record_trajectory);
    read_key(j, "first_ride_includes_origin", c.first_ride_includes_origin);
    c.validate();
    return c;
}

json to_json(const FixedPointResult& r) {
    return json{{"p", r.p.vector()},      {"rho", r.rho},           {"a", r.rates.birth},
                {"b", r.rates.death},     {"residual", r.residual}, {"iterations", r.iterations}};
}

json to_json(const Metrics& m) {
    return json{{"p0", m.p0},
                {"pK", m.pK},
                {"p0_plus_pK", m.p_problematic},
                {"eq", m.mean_bikes},
                {"profit", m.profit}};
}

json to_json(const EventCounts& c) {
    return json{{"arrivals", c.arrivals},
                {"rentals", c.rentals},
                {"rentals_after_walk", c.rentals_after_walk},
                {"walk_starts", c.walk_starts},
                {"walk_abandonments", c.walk_abandonments},
                {"immediate_abandonments", c.immediate_abandonments},
                {"abandonments", c.abandonments()},
                {"re_rides", c.re_rides},
                {"returns", c.returns}};
}

json to_json(const SimReport& r) {
    return json{{"time_avg_measure", r.time_avg_measure.vector()},
                {"event_counts", to_json(r.event_counts)},
                {"window_length", r.window_length},
                {"walkers_at_window_start", r.walkers_at_window_start},
                {"walkers_at_end", r.walkers_at_end},
                {"total_events", r.total_events},
                {"invariants_checked", r.invariants_checked}};
}

json to_json(const SweepRecord& r) {
    json j{{"params", params_to_json(r.params)}, {"source", to_string(r.source)}};
    if (r.ok())
        j["metrics"] = to_json(r.metrics);
    else
        j["error"] = *r.error;
    return j;
}

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open parameter file '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("cannot parse '" + path + "': " + e.what());
    }
}

void apply_overrides(json& j, const std::vector<std::string>& overrides) {
    for (const auto& kv : overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos || eq == 0) throw ConfigError("override '" + kv + "' is not key=value");
        const std::string key = kv.substr(0, eq);
        const std::string value = kv.substr(eq + 1);
        json parsed = json::parse(value, nullptr, false);
        j[key] = parsed.is_discarded() ? json(value) : parsed;
    }
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write '" + path + "'");
    out << text;
    if (!out) throw ConfigError("failed writing '" + path + "'");
}

}  // namespace bikeshare
