#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "qtm/protocol.hpp"
#include "qtm/transmon.hpp"

namespace qtm {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Experiment description: protocol loop, optional device backend, the true
/// field, pulse synthesis parameters, and output paths. Sections and keys
/// are fixed; unknown keys are errors.
struct ExperimentConfig {
    ProtocolConfig protocol;

    std::optional<TransmonParams> device;
    double reference_flux = 0.0; // device.phi_c_wb

    std::optional<double> true_field;  // field.h_true_t
    std::optional<double> true_flux;   // field.phi_true_wb

    double detuning = 0.0;      // pulse.delta_omega_rad_s
    double v1 = 0.0;            // pulse.v1_volts
    double v2 = 0.0;            // pulse.v2_volts
    double sample_rate = 0.0;   // pulse.sample_rate_hz

    std::string records_csv;
    std::string result_json;
    std::string waveform_csv;
};

namespace config_detail {

struct RawConfig {
    // section -> key -> (value, line)
    std::map<std::string, std::map<std::string, std::pair<std::string, int>>> values;
};

inline std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline RawConfig parse_ini(std::istream& in, const std::string& name) {
    RawConfig raw;
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[') {
            if (t.back() != ']')
                throw ConfigError(name + ":" + std::to_string(lineno) + ": malformed section header");
            section = trim(t.substr(1, t.size() - 2));
            continue;
        }
        auto eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError(name + ":" + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(t.substr(0, eq));
        std::string val = trim(t.substr(eq + 1));
        if (section.empty())
            throw ConfigError(name + ":" + std::to_string(lineno) + ": key outside any section");
        raw.values[section][key] = {val, lineno};
    }
    return raw;
}

inline double to_double(const std::string& v, const std::string& where) {
    try {
        std::size_t pos = 0;
        double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing characters");
        return x;
    } catch (const std::exception&) {
        throw ConfigError(where + ": not a number: " + v);
    }
}

inline long long to_int(const std::string& v, const std::string& where) {
    try {
        std::size_t pos = 0;
        long long x = std::stoll(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing characters");
        return x;
    } catch (const std::exception&) {
        throw ConfigError(where + ": not an integer: " + v);
    }
}

} // namespace config_detail

/// Builds the experiment configuration from parsed key/value pairs,
/// failing fast on unknown sections or keys.
inline ExperimentConfig build_config(const config_detail::RawConfig& raw,
                                     const std::string& name) {
    using namespace config_detail;
    ExperimentConfig cfg;
    TransmonParams device;
    bool have_device = false;

    for (const auto& [section, entries] : raw.values) {
        for (const auto& [key, vp] : entries) {
            const auto& [val, lineno] = vp;
            const std::string where = name + ":" + std::to_string(lineno) +
                                      " [" + section + "] " + key;
            if (section == "protocol") {
                if (key == "d") cfg.protocol.base = static_cast<int>(to_int(val, where));
                else if (key == "steps") cfg.protocol.steps = static_cast<int>(to_int(val, where));
                else if (key == "tau0_s") cfg.protocol.tau0 = to_double(val, where);
                else if (key == "h_range_t") cfg.protocol.field_range = to_double(val, where);
                else if (key == "mode") {
                    if (val == "analytic") cfg.protocol.mode = RunMode::analytic;
                    else if (val == "sampled") cfg.protocol.mode = RunMode::sampled;
                    else throw ConfigError(where + ": mode must be analytic or sampled");
                } else if (key == "seed")
                    cfg.protocol.seed = static_cast<std::uint64_t>(to_int(val, where));
                else throw ConfigError(where + ": unknown key");
            } else if (section == "device") {
                have_device = true;
                if (key == "e_c_j") device.charging_energy = to_double(val, where);
                else if (key == "e_j_sigma_j") device.josephson_sum = to_double(val, where);
                else if (key == "asymmetry") device.asymmetry = to_double(val, where);
                else if (key == "loop_area_m2") device.loop_area = to_double(val, where);
                else if (key == "n_g") device.charge_bias = to_double(val, where);
                else if (key == "phi_c_wb") cfg.reference_flux = to_double(val, where);
                else throw ConfigError(where + ": unknown key");
            } else if (section == "field") {
                if (key == "h_true_t") cfg.true_field = to_double(val, where);
                else if (key == "phi_true_wb") cfg.true_flux = to_double(val, where);
                else throw ConfigError(where + ": unknown key");
            } else if (section == "pulse") {
                if (key == "delta_omega_rad_s") cfg.detuning = to_double(val, where);
                else if (key == "v1_volts") cfg.v1 = to_double(val, where);
                else if (key == "v2_volts") cfg.v2 = to_double(val, where);
                else if (key == "sample_rate_hz") cfg.sample_rate = to_double(val, where);
                else throw ConfigError(where + ": unknown key");
            } else if (section == "output") {
                if (key == "records_csv") cfg.records_csv = val;
                else if (key == "result_json") cfg.result_json = val;
                else if (key == "waveform_csv") cfg.waveform_csv = val;
                else throw ConfigError(where + ": unknown key");
            } else {
                throw ConfigError(name + ":" + std::to_string(lineno) +
                                  ": unknown section [" + section + "]");
            }
        }
    }
    if (have_device) cfg.device = device;
    return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    return build_config(config_detail::parse_ini(in, path), path);
}

/// Applies `--section.key=value` overrides on top of file values.
inline void apply_overrides(config_detail::RawConfig& raw,
                            const std::vector<std::string>& overrides) {
    for (const auto& ov : overrides) {
        std::string s = ov;
        if (s.rfind("--", 0) == 0) s = s.substr(2);
        auto dot = s.find('.');
        auto eq = s.find('=');
        if (dot == std::string::npos || eq == std::string::npos || dot > eq)
            throw ConfigError("override must look like --section.key=value: " + ov);
        raw.values[s.substr(0, dot)][s.substr(dot + 1, eq - dot - 1)] = {s.substr(eq + 1), 0};
    }
}

} // namespace qtm
