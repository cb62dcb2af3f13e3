// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "isac/linalg.hpp"
#include "isac/rng.hpp"
#include "isac/scenario.hpp"

namespace isac {

/// Urban-microcell constants (distances in metres, losses in dB).
struct UmiParameters {
    double los_prob_near = 18.0;
    double los_prob_decay = 36.0;
    double los_intercept = 30.18;
    double los_slope = 26.0;
    double nlos_intercept = 34.53;
    double nlos_slope = 38.0;
    double shadow_std_los = 4.0;
    double shadow_std_nlos = 10.0;
    double k_intercept = 1.3;   // K = 10^(k_intercept - k_slope * d)
    double k_slope = 0.003;
};

double los_probability(double distance, const UmiParameters& p = {});
double pathloss_db(double distance, bool los, const UmiParameters& p = {});
double rician_k(double distance, bool los, const UmiParameters& p = {});

struct LargeScaleSample {
    double pathloss_db = 0.0;
    double shadowing_db = 0.0;
    double rician_k = 0.0;  // linear
    bool is_los = false;

    /// Linear gain including shadowing.
    double gain() const;
};

/// Draws LoS state and log-normal shadowing for a link of the given 3D length.
LargeScaleSample large_scale(double distance, Engine& rng, const UmiParameters& p = {});

/// ULA response, entry m = exp(j*pi*m*sin(azimuth)*cos(elevation)).
VectorXcd array_response(double azimuth, double elevation, int antennas);

/// Local scattering correlation with a Gaussian angular spread (unit diagonal).
MatrixXcd local_scattering_corr(double nominal_azimuth, double asd, int antennas);

struct LinkStats {
    double beta = 0.0;
    double rician_k = 0.0;
    bool is_los = false;
    VectorXcd los_component;  // zero unless is_los
    MatrixXcd nlos_corr;      // tr = M * beta / (K + 1)
    MatrixXcd nlos_sqrt;      // cached principal root, may be empty

    /// Total correlation h_bar h_bar^H + R_nlos seen by a phase-unaware estimator.
    MatrixXcd total_corr() const;
};

LinkStats make_link_stats(const LargeScaleSample& ls, double azimuth, double elevation, double asd,
                          int antennas);

/// One Rician realization e^{j psi} h_bar + R^{1/2} z.
VectorXcd sample_comm_channel(const LinkStats& stats, Engine& rng);

struct ClutterStats {
    double gain = 0.0;  // clutter-scaled NLoS path gain between the AP pair
    MatrixXcd rx_corr;
    MatrixXcd tx_corr;
    MatrixXcd rx_sqrt;
    MatrixXcd tx_sqrt;
};

ClutterStats make_clutter_stats(double gain, double rx_azimuth, double tx_azimuth, double asd,
                                int antennas, ClutterGainSplit split);

/// Kronecker realization R_rx^{1/2} W (R_tx^{1/2})^T.
MatrixXcd sample_clutter_channel(const ClutterStats& c, Engine& rng);

/// Bistatic radar range equation.
double bistatic_gain(double d_tx, double d_rx, double wavelength, double rcs_variance);

struct SensingChannel {
    VectorXcd h0;                        // concatenated (N_tx*M)
    std::vector<VectorXcd> steering;     // a_k toward the target, per transmit AP
    VectorXd direct_gain;                // beta_{0,k}
    MatrixXd bistatic;                   // beta_{r,k}, n_rx x n_tx
};

/// Everything large-scale about one network drop.
struct NetworkStats {
    int n_tx = 0;
    int n_rx = 0;
    int n_ues = 0;
    int antennas = 0;
    std::vector<LinkStats> links;        // index ue * n_tx + ap
    std::vector<ClutterStats> clutter;   // index rx * n_tx + ap
    SensingChannel sensing;

    const LinkStats& link(int ue, int ap) const { return links[static_cast<std::size_t>(ue * n_tx + ap)]; }
    const ClutterStats& clutter_of(int rx, int ap) const
    {
        return clutter[static_cast<std::size_t>(rx * n_tx + ap)];
    }
    /// beta_{i,k} as an n_ues x n_tx matrix.
    MatrixXd gains() const;
};

NetworkStats build_network_stats(const Scenario& scenario, const Geometry& geometry, std::uint64_t trial,
                                 const UmiParameters& umi = {});

}  // namespace isac
