// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include <Eigen/Dense>

namespace isac {

struct SystemConfig;

/// Reliability and latency requirements of the URLLC users for one blocklength.
struct UrllcTargets {
    std::vector<double> packet_bits;      // b_i
    std::vector<double> dep_threshold;    // epsilon_i^(th)
    std::vector<double> delay_threshold;  // D_i^(th), seconds
    int blocklength = 0;                  // L
    int pilot_len = 0;                    // L_p
    double bandwidth = 0.0;               // B, Hz

    int n_ues() const { return static_cast<int>(packet_bits.size()); }
    int data_len() const { return blocklength - pilot_len; }
    double max_dep_threshold() const;
    double total_packet_bits() const;
};

/// Per-UE targets expanded from a configuration (lists broadcast to n_ues).
UrllcTargets urllc_targets(const SystemConfig& config);

/// Upper tail of the standard normal distribution.
double q_function(double x);

/// Inverse of q_function on (0, 1). Throws std::domain_error outside.
double q_inverse(double p);

/// Normal-approximation DEP upper bound for `bits` bits over L - L_p data
/// symbols at effective SINR `sinr`.
double dep_upper_bound(double sinr, int blocklength, int pilot_len, double bits);

/// SINR at which dep_upper_bound equals `dep_threshold`.
double sinr_threshold(double dep_threshold, int blocklength, int pilot_len, double bits);

/// Transmission delay bound with 1/(1-eps) average retransmissions, seconds.
double delay_upper_bound(int blocklength, double bandwidth, double dep_threshold);

/// Largest blocklength meeting every UE's delay budget. Throws ConfigError
/// when the result does not exceed the pilot length.
int max_blocklength(const UrllcTargets& targets);

/// Retransmission-adjusted energy efficiency (bits/J) for the power vector
/// rho (square-root powers). Throws std::invalid_argument for zero power.
double energy_efficiency(const Eigen::VectorXd& rho, const UrllcTargets& targets);

}  // namespace isac
