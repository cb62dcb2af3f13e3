// SPDX-License-Identifier: Apache-2.0
#include "isac/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "isac/errors.hpp"
#include "isac/urllc.hpp"

namespace isac {

double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
double linear_to_db(double linear) { return 10.0 * std::log10(linear); }

namespace {

double per_ue(const std::vector<double>& values, int ue)
{
    if (values.size() == 1) {
        return values.front();
    }
    return values.at(static_cast<std::size_t>(ue));
}

bool inside(Point2 p, double side)
{
    constexpr double slack = 1e-9;
    return p.x >= -slack && p.y >= -slack && p.x <= side + slack && p.y <= side + slack;
}

}  // namespace

double SystemConfig::packet_bits_of(int ue) const { return per_ue(packet_bits, ue); }
double SystemConfig::dep_threshold_of(int ue) const { return per_ue(dep_threshold, ue); }
double SystemConfig::delay_threshold_of(int ue) const { return per_ue(delay_threshold, ue); }

double SystemConfig::max_dep_threshold() const
{
    double worst = 0.0;
    for (int i = 0; i < n_ues; ++i) {
        worst = std::max(worst, dep_threshold_of(i));
    }
    return worst;
}

double SystemConfig::total_packet_bits() const
{
    double total = 0.0;
    for (int i = 0; i < n_ues; ++i) {
        total += packet_bits_of(i);
    }
    return total;
}

void SystemConfig::validate() const
{
    if (n_tx_aps < 1 || n_rx_aps < 1 || n_ues < 1 || antennas_per_ap < 1) {
        throw ConfigError("AP, UE and antenna counts must be positive");
    }
    if (!(area_side > 0.0)) {
        throw ConfigError("area_side must be positive");
    }
    for (const auto* list : {&packet_bits, &dep_threshold, &delay_threshold}) {
        if (list->size() != 1 && list->size() != static_cast<std::size_t>(n_ues)) {
            throw ConfigError("per-UE lists must have one entry or n_ues entries");
        }
    }
    if (!(carrier_freq > 0.0 && bandwidth > 0.0 && noise_power > 0.0 && max_ap_power > 0.0 &&
          pilot_power > 0.0)) {
        throw ConfigError("frequencies and powers must be positive");
    }
    if (pilot_len < 1 || blocklength <= pilot_len) {
        throw ConfigError("blocklength must exceed pilot_len >= 1");
    }
    for (int i = 0; i < n_ues; ++i) {
        const double eps = dep_threshold_of(i);
        if (!(eps > 0.0 && eps < 0.5)) {
            throw ConfigError("DEP thresholds must lie in (0, 0.5)");
        }
        if (!(packet_bits_of(i) > 0.0) || !(delay_threshold_of(i) > 0.0)) {
            throw ConfigError("packet sizes and delay thresholds must be positive");
        }
    }
    if (!(sensing_sinr_threshold >= 0.0) || !(rcs_variance >= 0.0) || !(clutter_scaling >= 0.0)) {
        throw ConfigError("sensing threshold, RCS and clutter scaling must be non-negative");
    }
    if (!(sca.objective_tol > 0.0 && sca.slack_tol > 0.0 && sca.penalty > 0.0) ||
        sca.max_iterations < 1) {
        throw ConfigError("SCA parameters must be positive");
    }
    if (mc_inner < 1) {
        throw ConfigError("mc_inner must be positive");
    }
    if (rx_radius < 0.0 || angular_spread_deg < 0.0 || min_ue_distance < 0.0) {
        throw ConfigError("geometry offsets must be non-negative");
    }
    const int l_max = max_blocklength(urllc_targets(*this));
    if (blocklength > l_max) {
        throw ConfigError("blocklength " + std::to_string(blocklength) +
                          " exceeds the delay-limited maximum " + std::to_string(l_max));
    }
}

double distance_2d(Point2 a, Point2 b) { return std::hypot(b.x - a.x, b.y - a.y); }

double distance_3d(Point2 a, double ha, Point2 b, double hb)
{
    const double d = distance_2d(a, b);
    return std::hypot(d, hb - ha);
}

double azimuth(Point2 from, Point2 to) { return std::atan2(to.y - from.y, to.x - from.x); }

double elevation(Point2 from, double h_from, Point2 to, double h_to)
{
    return std::atan2(h_to - h_from, distance_2d(from, to));
}

Scenario::Scenario(SystemConfig config, Geometry geometry)
    : config_(std::move(config)), geometry_(std::move(geometry))
{
}

Scenario build_scenario(const SystemConfig& config)
{
    config.validate();

    Geometry g;
    g.ap_height = config.ap_height;
    g.ue_height = config.ue_height;
    g.target_height = config.target_height;
    const double side = config.area_side;
    g.target = {side / 2.0, side / 2.0};

    if (config.ap_layout == ApLayout::grid) {
        const int cols = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(config.n_tx_aps))));
        const int rows = (config.n_tx_aps + cols - 1) / cols;
        for (int k = 0; k < config.n_tx_aps; ++k) {
            const int r = k / cols;
            const int c = k % cols;
            g.tx_aps.push_back({(c + 0.5) * side / cols, (r + 0.5) * side / rows});
        }
    } else {
        Engine rng = make_stream(config.rng_seed, Stage::geometry, 0);
        for (int k = 0; k < config.n_tx_aps; ++k) {
            const double x = uniform(rng, 0.0, side);
            const double y = uniform(rng, 0.0, side);
            g.tx_aps.push_back({x, y});
        }
    }

    for (int r = 0; r < config.n_rx_aps; ++r) {
        const double angle = std::numbers::pi + 2.0 * std::numbers::pi * r / config.n_rx_aps;
        double dx = config.rx_radius * std::cos(angle);
        double dy = config.rx_radius * std::sin(angle);
        // snap round-off so axis-aligned offsets land on exact coordinates
        if (std::abs(dx) < 1e-12 * (1.0 + config.rx_radius)) dx = 0.0;
        if (std::abs(dy) < 1e-12 * (1.0 + config.rx_radius)) dy = 0.0;
        const Point2 p{g.target.x + dx, g.target.y + dy};
        if (!inside(p, side)) {
            throw ConfigError("receive AP falls outside the simulation area");
        }
        g.rx_aps.push_back(p);
    }

    Scenario base(config, g);
    return Scenario(config, drop_ues(base, 0));
}

Geometry drop_ues(const Scenario& scenario, std::uint64_t trial)
{
    const SystemConfig& cfg = scenario.config();
    Geometry g = scenario.geometry();
    g.ues.clear();
    Engine rng = scenario.stream(Stage::ue_drop, trial);
    const double side = cfg.area_side;
    const double min_d = cfg.min_ue_distance;

    for (int i = 0; i < cfg.n_ues; ++i) {
        Point2 p{uniform(rng, 0.0, side), uniform(rng, 0.0, side)};
        // push the UE radially out of any AP's exclusion disc; a few passes
        // settle the rare case where two discs overlap
        for (int pass = 0; pass < 4; ++pass) {
            bool moved = false;
            for (const Point2& ap : g.tx_aps) {
                const double d = distance_2d(ap, p);
                if (d < min_d) {
                    const double ux = d > 0.0 ? (p.x - ap.x) / d : 1.0;
                    const double uy = d > 0.0 ? (p.y - ap.y) / d : 0.0;
                    p = {ap.x + ux * min_d, ap.y + uy * min_d};
                    p.x = std::clamp(p.x, 0.0, side);
                    p.y = std::clamp(p.y, 0.0, side);
                    moved = true;
                }
            }
            if (!moved) {
                break;
            }
        }
        g.ues.push_back(p);
    }
    return g;
}

}  // namespace isac
