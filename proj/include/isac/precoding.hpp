// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "isac/linalg.hpp"
#include "isac/propagation.hpp"
#include "isac/rng.hpp"

namespace isac {

struct PilotAssignment {
    std::vector<int> pilot_of_ue;
    std::vector<std::vector<int>> groups;  // UEs per pilot index

    bool shared() const;
};

/// Orthogonal pilots when they suffice; otherwise UEs are visited in order of
/// decreasing best-AP gain and each one beyond the pilot budget joins the
/// pilot whose current group is weakest at that UE's strongest AP.
/// `gains` is n_ues x n_aps.
PilotAssignment assign_pilots(int n_ues, int pilot_len, const MatrixXd& gains);

/// Phase-unaware LMMSE estimate from a de-spread pilot observation
/// y = sqrt(p L_p) (h + sum of sharing UEs' channels) + n.
VectorXcd lmmse_estimate(const VectorXcd& pilot_obs, const MatrixXcd& own_corr,
                         const MatrixXcd& sharing_corr_sum, double pilot_power, int pilot_len,
                         double noise_power);

/// Precomputed LMMSE filters for one network drop. Channels are passed as
/// collective (N_tx*M) x N_ue matrices.
class ChannelEstimator {
public:
    ChannelEstimator(const NetworkStats& net, PilotAssignment pilots, double pilot_power, int pilot_len,
                     double noise_power);

    /// Synthesizes pilot observations for `channels` and returns the estimates.
    MatrixXcd estimate(const MatrixXcd& channels, Engine& rng) const;

    const PilotAssignment& pilots() const { return pilots_; }
    /// Error covariance R - R Psi^{-1} R (scaled) for UE i at AP k.
    MatrixXcd error_covariance(int ue, int ap) const;

private:
    int n_tx_ = 0;
    int n_ues_ = 0;
    int antennas_ = 0;
    double pilot_scale_ = 0.0;  // sqrt(p * L_p)
    double noise_power_ = 0.0;
    PilotAssignment pilots_;
    std::vector<MatrixXcd> filters_;     // ue * n_tx + ap
    std::vector<MatrixXcd> own_corr_;    // ue * n_tx + ap
};

struct PrecoderSet {
    MatrixXcd comm;      // (N_tx*M) x N_ue, unit-norm columns
    VectorXcd sensing;   // (N_tx*M), unit norm
    int antennas = 0;

    int n_streams() const { return static_cast<int>(comm.cols()) + 1; }
    int n_aps() const { return antennas > 0 ? static_cast<int>(sensing.size()) / antennas : 0; }
    /// Stream j with j = 0 the sensing stream.
    VectorXcd stream(int j) const { return j == 0 ? sensing : VectorXcd(comm.col(j - 1)); }
    /// Per-AP block w_{j,k}.
    VectorXcd block(int j, int ap) const { return stream(j).segment(static_cast<Eigen::Index>(ap) * antennas, antennas); }
};

/// delta = N_ue * sigma^2 / P_tx.
double rzf_regularization(int n_ues, double noise_power, double max_ap_power);

/// Unit-norm centralized RZF precoders (one column per estimate).
MatrixXcd rzf_precoders(const MatrixXcd& estimates, double delta);

/// Unit-norm projection of h0 onto the orthogonal complement of the estimates.
/// Throws DegenerateProjection when the residual is below 1e-9 * |h0|.
VectorXcd zf_sensing_precoder(const MatrixXcd& estimates, const VectorXcd& h0);

}  // namespace isac
