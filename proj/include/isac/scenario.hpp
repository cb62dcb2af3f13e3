// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "isac/rng.hpp"

namespace isac {

inline constexpr double kSpeedOfLight = 299792458.0;

double dbm_to_watts(double dbm);
double db_to_linear(double db);
double linear_to_db(double linear);

struct ScaParams {
    double objective_tol = 1e-3;  ///< relative change of f between iterations
    double slack_tol = 1e-6;      ///< slack below this is zeroed for the next iteration
    double penalty = 10.0;
    int max_iterations = 50;
};

enum class ApLayout { grid, random };

/// How the clutter path gain g is distributed over the Kronecker factors.
///   even: tr(R_rx) = tr(R_tx) = M*sqrt(g)  (per-element E|H_mn|^2 = g)
///   full: tr(R_rx) = tr(R_tx) = M*g        (both factors carry the full gain)
enum class ClutterGainSplit { even, full };

struct SystemConfig {
    int n_tx_aps = 16;
    int n_rx_aps = 2;
    int n_ues = 8;
    int antennas_per_ap = 4;
    double area_side = 500.0;        // m
    double carrier_freq = 1.9e9;     // Hz
    double bandwidth = 200e3;        // Hz
    double noise_power = dbm_to_watts(-114.0);
    double max_ap_power = 0.1;       // W
    double pilot_power = 0.05;       // W
    int pilot_len = 10;
    int blocklength = 180;
    std::vector<double> packet_bits{256.0};
    std::vector<double> dep_threshold{1e-5};
    std::vector<double> delay_threshold{1e-3};  // s
    double sensing_sinr_threshold = db_to_linear(3.0);
    double rcs_variance = 1.0;       // m^2 (0 dBsm)
    double clutter_scaling = 0.3;
    ScaParams sca{};
    int mc_inner = 300;
    std::uint64_t rng_seed = 1;

    ApLayout ap_layout = ApLayout::grid;
    double ap_height = 10.0;
    double ue_height = 1.5;
    double target_height = 1.5;
    double rx_radius = 50.0;            // receive APs sit on a circle around the target
    double angular_spread_deg = 15.0;   // local scattering ASD
    double min_ue_distance = 10.0;
    ClutterGainSplit clutter_split = ClutterGainSplit::full;

    double wavelength() const { return kSpeedOfLight / carrier_freq; }
    int data_len() const { return blocklength - pilot_len; }
    double packet_bits_of(int ue) const;
    double dep_threshold_of(int ue) const;
    double delay_threshold_of(int ue) const;
    double max_dep_threshold() const;
    double total_packet_bits() const;

    /// Throws ConfigError when an invariant does not hold.
    void validate() const;
};

struct Point2 {
    double x = 0.0;
    double y = 0.0;
};

struct Geometry {
    std::vector<Point2> tx_aps;
    std::vector<Point2> rx_aps;
    std::vector<Point2> ues;
    Point2 target;
    double ap_height = 10.0;
    double ue_height = 1.5;
    double target_height = 1.5;
};

double distance_2d(Point2 a, Point2 b);
double distance_3d(Point2 a, double ha, Point2 b, double hb);
/// Azimuth of `to` seen from `from`, measured from the x axis, in (-pi, pi].
double azimuth(Point2 from, Point2 to);
/// Elevation of `to` seen from `from` (negative when looking down).
double elevation(Point2 from, double h_from, Point2 to, double h_to);

class Scenario {
public:
    Scenario(SystemConfig config, Geometry geometry);

    const SystemConfig& config() const { return config_; }
    const Geometry& geometry() const { return geometry_; }

    Engine stream(Stage stage, std::uint64_t trial, std::uint64_t index = 0) const
    {
        return make_stream(config_.rng_seed, stage, trial, index);
    }

private:
    SystemConfig config_;
    Geometry geometry_;
};

/// Places APs (grid by default), the target at the area centre and the
/// receive APs around it; UEs come from drop_ues(.., 0).
Scenario build_scenario(const SystemConfig& config);

/// Fresh UE drop for one Monte Carlo trial. Deterministic per (seed, trial).
Geometry drop_ues(const Scenario& scenario, std::uint64_t trial);

}  // namespace isac
