#pragma once
// Sweep configuration: JSON schema, validation, and a lossless JSON echo.
//
//   {
//     "name": "fig2_ferro",
//     "model": {"n_sites": 8, "gamma": 0.4712, "theta": 0.0},
//     "sweep": {"axis": "temperature",
//               "grid": [0.1, 1.0] | {"logspace": {"start": 0.05, "stop": 50, "count": 40}}
//                                  | {"linspace": {"start": 0, "stop": 1.57, "count": 20, "endpoints": false}}},
//     "fixed": {"temperature": 10.0},          // or {"beta": 0.1}; used by the gamma axis
//     "outputs": "out/",
//     "eps_deg": null,
//     "quadrature": {"horizon_factor": 12, "panels": 2048},
//     "oracle": {"enabled": false, "delta": 1e-3},
//     "timing": false, "workers": 1, "seed": 0
//   }

#include "thermoqfi/operators.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

namespace thermoqfi::harness {

using json = nlohmann::json;

enum class SweepAxis { temperature, gamma };

inline std::string to_string(SweepAxis a) { return a == SweepAxis::temperature ? "temperature" : "gamma"; }

inline SweepAxis parse_sweep_axis(const std::string& s) {
    if (s == "temperature") return SweepAxis::temperature;
    if (s == "gamma") return SweepAxis::gamma;
    throw ConfigError("unknown sweep axis '" + s + "' (expected temperature or gamma)");
}

struct QuadratureConfig {
    double horizon_factor = 12.0;  // horizon in units of beta
    int panels = 2048;
    bool operator==(const QuadratureConfig&) const = default;
};

struct OracleConfig {
    bool enabled = false;
    double delta = 1e-3;
    bool operator==(const OracleConfig&) const = default;
};

struct SweepConfig {
    std::string name = "sweep";
    ModelSpec model;
    SweepAxis axis = SweepAxis::temperature;
    std::vector<double> grid;
    double fixed_temperature = 1.0;  // gamma axis only
    std::string outputs = ".";
    std::optional<double> eps_deg;
    QuadratureConfig quadrature;
    OracleConfig oracle;
    bool timing = false;
    int workers = 1;
    std::uint64_t seed = 0;

    bool operator==(const SweepConfig& o) const {
        return name == o.name && model.n_sites == o.model.n_sites && model.gamma == o.model.gamma &&
               model.theta == o.model.theta && axis == o.axis && grid == o.grid &&
               fixed_temperature == o.fixed_temperature && outputs == o.outputs && eps_deg == o.eps_deg &&
               quadrature == o.quadrature && oracle == o.oracle && timing == o.timing && workers == o.workers &&
               seed == o.seed;
    }

    void validate() const {
        model.validate();
        if (grid.empty()) throw ConfigError("sweep grid is empty");
        for (double v : grid)
            if (!std::isfinite(v)) throw ConfigError("sweep grid contains a non-finite value");
        bool inc = true, dec = true;
        for (std::size_t i = 1; i < grid.size(); ++i) {
            inc = inc && grid[i] > grid[i - 1];
            dec = dec && grid[i] < grid[i - 1];
        }
        if (!inc && !dec) throw ConfigError("sweep grid must be strictly monotone");
        if (axis == SweepAxis::temperature) {
            for (double t : grid)
                if (!(t > 0.0)) throw ConfigError("temperatures must be > 0");
        } else if (!(fixed_temperature > 0.0) || !std::isfinite(fixed_temperature)) {
            throw ConfigError("fixed temperature must be finite and > 0");
        }
        if (eps_deg && !(*eps_deg > 0.0)) throw ConfigError("eps_deg must be > 0");
        if (workers < 1) throw ConfigError("workers must be >= 1");
        if (!(quadrature.horizon_factor > 0.0) || quadrature.panels < 16)
            throw ConfigError("quadrature needs horizon_factor > 0 and panels >= 16");
        if (oracle.enabled && !(oracle.delta >= 1e-4 && oracle.delta <= 1e-2))
            throw ConfigError("oracle delta must be in [1e-4, 1e-2]");
    }
};

inline std::vector<double> logspace(double start, double stop, int count) {
    if (count < 1 || !(start > 0.0) || !(stop > 0.0)) throw ConfigError("logspace needs count >= 1 and positive ends");
    std::vector<double> out;
    if (count == 1) return {start};
    const double a = std::log(start), b = std::log(stop);
    for (int i = 0; i < count; ++i) out.push_back(std::exp(a + (b - a) * i / (count - 1)));
    out.front() = start;
    out.back() = stop;
    return out;
}

/// With endpoints=false the count points are interior: start + (i+1)(stop-start)/(count+1).
inline std::vector<double> linspace(double start, double stop, int count, bool endpoints = true) {
    if (count < 1) throw ConfigError("linspace needs count >= 1");
    std::vector<double> out;
    if (!endpoints) {
        for (int i = 0; i < count; ++i) out.push_back(start + (stop - start) * (i + 1) / (count + 1));
        return out;
    }
    if (count == 1) return {start};
    for (int i = 0; i < count; ++i) out.push_back(start + (stop - start) * i / (count - 1));
    return out;
}

inline std::vector<double> parse_grid(const json& g) {
    if (g.is_array()) return g.get<std::vector<double>>();
    if (g.is_object() && g.contains("logspace")) {
        const json& s = g.at("logspace");
        return logspace(s.at("start").get<double>(), s.at("stop").get<double>(), s.at("count").get<int>());
    }
    if (g.is_object() && g.contains("linspace")) {
        const json& s = g.at("linspace");
        return linspace(s.at("start").get<double>(), s.at("stop").get<double>(), s.at("count").get<int>(),
                        s.value("endpoints", true));
    }
    throw ConfigError("grid must be an array or a {logspace|linspace} object");
}

inline SweepConfig config_from_json(const json& j) {
    try {
        SweepConfig c;
        c.name = j.value("name", c.name);
        const json& m = j.at("model");
        c.model.n_sites = m.at("n_sites").get<int>();
        c.model.gamma = m.value("gamma", c.model.gamma);
        c.model.theta = m.value("theta", c.model.theta);
        const json& s = j.at("sweep");
        c.axis = parse_sweep_axis(s.at("axis").get<std::string>());
        c.grid = parse_grid(s.at("grid"));
        if (j.contains("fixed")) {
            const json& f = j.at("fixed");
            if (f.contains("temperature")) c.fixed_temperature = f.at("temperature").get<double>();
            if (f.contains("beta")) c.fixed_temperature = 1.0 / f.at("beta").get<double>();
            if (f.contains("gamma")) c.model.gamma = f.at("gamma").get<double>();
        }
        c.outputs = j.value("outputs", c.outputs);
        if (j.contains("eps_deg") && !j.at("eps_deg").is_null()) c.eps_deg = j.at("eps_deg").get<double>();
        if (j.contains("quadrature")) {
            c.quadrature.horizon_factor = j.at("quadrature").value("horizon_factor", c.quadrature.horizon_factor);
            c.quadrature.panels = j.at("quadrature").value("panels", c.quadrature.panels);
        }
        if (j.contains("oracle")) {
            const json& o = j.at("oracle");
            if (o.is_boolean()) {
                c.oracle.enabled = o.get<bool>();
            } else {
                c.oracle.enabled = o.value("enabled", c.oracle.enabled);
                c.oracle.delta = o.value("delta", c.oracle.delta);
            }
        }
        c.timing = j.value("timing", c.timing);
        c.workers = j.value("workers", c.workers);
        c.seed = j.value("seed", c.seed);
        c.validate();
        return c;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
}

/// Full echo with the grid expanded; config_from_json(config_to_json(c)) == c.
inline json config_to_json(const SweepConfig& c) {
    json j;
    j["name"] = c.name;
    j["model"] = {{"n_sites", c.model.n_sites}, {"gamma", c.model.gamma}, {"theta", c.model.theta},
                  {"boundary", "open"}};
    j["sweep"] = {{"axis", to_string(c.axis)}, {"grid", c.grid}};
    j["fixed"] = {{"temperature", c.fixed_temperature}, {"gamma", c.model.gamma}};
    j["outputs"] = c.outputs;
    j["eps_deg"] = c.eps_deg ? json(*c.eps_deg) : json(nullptr);
    j["quadrature"] = {{"horizon_factor", c.quadrature.horizon_factor}, {"panels", c.quadrature.panels}};
    j["oracle"] = {{"enabled", c.oracle.enabled}, {"delta", c.oracle.delta}};
    j["timing"] = c.timing;
    j["workers"] = c.workers;
    j["seed"] = c.seed;
    return j;
}

inline SweepConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    json j;
    try {
        j = json::parse(in, nullptr, true, /*ignore_comments=*/true);
    } catch (const json::exception& e) {
        throw ConfigError("config '" + path + "': " + e.what());
    }
    return config_from_json(j);
}

}  // namespace thermoqfi::harness
