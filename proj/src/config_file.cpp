// SPDX-License-Identifier: Apache-2.0
#include "isac/config_file.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <istream>
#include <ostream>
#include <sstream>

#include "isac/errors.hpp"

namespace isac {

namespace {

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& text)
{
    const std::string t = trim(text);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc{} || ptr != t.data() + t.size() || t.empty() || !std::isfinite(v)) {
        throw ConfigError("'" + key + "': not a number: '" + text + "'");
    }
    return v;
}

long long parse_integer(const std::string& key, const std::string& text)
{
    const std::string t = trim(text);
    long long v = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc{} || ptr != t.data() + t.size() || t.empty()) {
        throw ConfigError("'" + key + "': not an integer: '" + text + "'");
    }
    return v;
}

int parse_int(const std::string& key, const std::string& text)
{
    const long long v = parse_integer(key, text);
    if (v < -1000000000LL || v > 1000000000LL) {
        throw ConfigError("'" + key + "': out of range");
    }
    return static_cast<int>(v);
}

std::vector<double> parse_list(const std::string& key, const std::string& text)
{
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        out.push_back(parse_double(key, item));
    }
    if (out.empty()) {
        throw ConfigError("'" + key + "': empty list");
    }
    return out;
}

std::string fmt(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt_list(const std::vector<double>& v)
{
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        s += (i ? "," : "") + fmt(v[i]);
    }
    return s;
}

struct Key {
    const char* name;
    std::function<void(SystemConfig&, const std::string&)> set;
    std::function<std::string(const SystemConfig&)> get;
};

#define ISAC_INT_KEY(name, field)                                                              \
    Key                                                                                        \
    {                                                                                          \
        name, [](SystemConfig& c, const std::string& v) { c.field = parse_int(name, v); },     \
            [](const SystemConfig& c) { return std::to_string(c.field); }                      \
    }
#define ISAC_DOUBLE_KEY(name, field)                                                           \
    Key                                                                                        \
    {                                                                                          \
        name, [](SystemConfig& c, const std::string& v) { c.field = parse_double(name, v); },  \
            [](const SystemConfig& c) { return fmt(c.field); }                                 \
    }
#define ISAC_LIST_KEY(name, field)                                                             \
    Key                                                                                        \
    {                                                                                          \
        name, [](SystemConfig& c, const std::string& v) { c.field = parse_list(name, v); },    \
            [](const SystemConfig& c) { return fmt_list(c.field); }                            \
    }

const std::vector<Key>& keys()
{
    static const std::vector<Key> table = {
        ISAC_INT_KEY("n_tx_aps", n_tx_aps),
        ISAC_INT_KEY("n_rx_aps", n_rx_aps),
        ISAC_INT_KEY("n_ues", n_ues),
        ISAC_INT_KEY("antennas_per_ap", antennas_per_ap),
        ISAC_DOUBLE_KEY("area_side_m", area_side),
        ISAC_DOUBLE_KEY("carrier_freq_hz", carrier_freq),
        ISAC_DOUBLE_KEY("bandwidth_hz", bandwidth),
        Key{"noise_power_dbm",
            [](SystemConfig& c, const std::string& v) {
                c.noise_power = dbm_to_watts(parse_double("noise_power_dbm", v));
            },
            [](const SystemConfig& c) { return fmt(linear_to_db(c.noise_power) + 30.0); }},
        ISAC_DOUBLE_KEY("max_ap_power_w", max_ap_power),
        ISAC_DOUBLE_KEY("pilot_power_w", pilot_power),
        ISAC_INT_KEY("pilot_len", pilot_len),
        ISAC_INT_KEY("blocklength", blocklength),
        ISAC_LIST_KEY("packet_bits", packet_bits),
        ISAC_LIST_KEY("dep_threshold", dep_threshold),
        ISAC_LIST_KEY("delay_threshold_s", delay_threshold),
        Key{"sensing_sinr_threshold_db",
            [](SystemConfig& c, const std::string& v) {
                c.sensing_sinr_threshold = db_to_linear(parse_double("sensing_sinr_threshold_db", v));
            },
            [](const SystemConfig& c) { return fmt(linear_to_db(c.sensing_sinr_threshold)); }},
        Key{"rcs_dbsm",
            [](SystemConfig& c, const std::string& v) { c.rcs_variance = db_to_linear(parse_double("rcs_dbsm", v)); },
            [](const SystemConfig& c) { return fmt(linear_to_db(c.rcs_variance)); }},
        ISAC_DOUBLE_KEY("clutter_scaling", clutter_scaling),
        ISAC_DOUBLE_KEY("sca_objective_tol", sca.objective_tol),
        ISAC_DOUBLE_KEY("sca_slack_tol", sca.slack_tol),
        ISAC_DOUBLE_KEY("sca_penalty", sca.penalty),
        ISAC_INT_KEY("sca_max_iterations", sca.max_iterations),
        ISAC_INT_KEY("mc_inner", mc_inner),
        Key{"rng_seed",
            [](SystemConfig& c, const std::string& v) {
                const long long s = parse_integer("rng_seed", v);
                if (s < 0) {
                    throw ConfigError("'rng_seed': must be non-negative");
                }
                c.rng_seed = static_cast<std::uint64_t>(s);
            },
            [](const SystemConfig& c) { return std::to_string(c.rng_seed); }},
        Key{"ap_layout",
            [](SystemConfig& c, const std::string& v) {
                const std::string t = trim(v);
                if (t == "grid") {
                    c.ap_layout = ApLayout::grid;
                } else if (t == "random") {
                    c.ap_layout = ApLayout::random;
                } else {
                    throw ConfigError("'ap_layout': expected grid or random");
                }
            },
            [](const SystemConfig& c) { return std::string(c.ap_layout == ApLayout::grid ? "grid" : "random"); }},
        ISAC_DOUBLE_KEY("ap_height_m", ap_height),
        ISAC_DOUBLE_KEY("ue_height_m", ue_height),
        ISAC_DOUBLE_KEY("target_height_m", target_height),
        ISAC_DOUBLE_KEY("rx_radius_m", rx_radius),
        ISAC_DOUBLE_KEY("angular_spread_deg", angular_spread_deg),
        ISAC_DOUBLE_KEY("min_ue_distance_m", min_ue_distance),
        Key{"clutter_split",
            [](SystemConfig& c, const std::string& v) {
                const std::string t = trim(v);
                if (t == "even") {
                    c.clutter_split = ClutterGainSplit::even;
                } else if (t == "full") {
                    c.clutter_split = ClutterGainSplit::full;
                } else {
                    throw ConfigError("'clutter_split': expected even or full");
                }
            },
            [](const SystemConfig& c) {
                return std::string(c.clutter_split == ClutterGainSplit::even ? "even" : "full");
            }},
    };
    return table;
}

#undef ISAC_INT_KEY
#undef ISAC_DOUBLE_KEY
#undef ISAC_LIST_KEY

}  // namespace

void apply_setting(SystemConfig& config, const std::string& key, const std::string& value)
{
    const std::string k = trim(key);
    for (const auto& entry : keys()) {
        if (k == entry.name) {
            entry.set(config, value);
            return;
        }
    }
    throw ConfigError("unknown config key '" + k + "'");
}

SystemConfig parse_config(std::istream& in, SystemConfig base)
{
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) {
            line.erase(hash);
        }
        if (trim(line).empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        }
        try {
            apply_setting(base, line.substr(0, eq), line.substr(eq + 1));
        } catch (const ConfigError& e) {
            throw ConfigError("config line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return base;
}

SystemConfig load_config_file(const std::string& path, SystemConfig base)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file '" + path + "'");
    }
    return parse_config(in, std::move(base));
}

void write_config(std::ostream& out, const SystemConfig& config)
{
    for (const auto& entry : keys()) {
        out << entry.name << " = " << entry.get(config) << '\n';
    }
}

std::vector<std::string> config_keys()
{
    std::vector<std::string> names;
    for (const auto& entry : keys()) {
        names.emplace_back(entry.name);
    }
    return names;
}

}  // namespace isac
