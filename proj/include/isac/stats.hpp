// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "isac/linalg.hpp"
#include "isac/precoding.hpp"
#include "isac/propagation.hpp"
#include "isac/scenario.hpp"

namespace isac {

enum class Execution { serial, parallel };

/// Deterministic scalars of the downlink SINR bound. Streams are indexed
/// 0..N_ue with 0 the sensing stream; UEs are indexed 0..N_ue-1 and UE i
/// owns stream i+1.
struct CommStatistics {
    VectorXd b;          // |E{h_i^H w_i}|
    VectorXd b_stderr;   // Monte Carlo standard error of b
    MatrixXd a;          // N_ue x (N_ue+1)
    MatrixXd F;          // N_tx x (N_ue+1), row k is diag(F_k)
    double noise_power = 0.0;
    int clamped = 0;     // negative variances clamped to zero
    int realizations = 0;

    int n_ues() const { return static_cast<int>(b.size()); }
    int n_streams() const { return static_cast<int>(a.cols()); }
    int n_aps() const { return static_cast<int>(F.rows()); }
};

/// Symbol-free sensing kernels averaged over realizations:
/// C_A = sum_{r,k} beta_{r,k} W_k^H a_k^* a_k^T W_k and
/// C_B = sum_{r,k} tr(R_rx) W_k^H R_tx^T W_k.
struct SensingCovariances {
    MatrixXcd c_a;
    MatrixXcd c_b;
};

enum class SymbolMode { expected, realized };

struct SensingQuadratics {
    MatrixXcd A;
    MatrixXcd B;
    double noise_floor = 0.0;  // L_d * M * N_rx * sigma^2
    SymbolMode mode = SymbolMode::expected;
};

/// Per-drop immutable model that can synthesize any channel/estimate/precoder
/// realization from its index.
class MonteCarloModel {
public:
    MonteCarloModel(const Scenario& scenario, NetworkStats network, std::uint64_t trial);

    struct Realization {
        MatrixXcd channels;   // (N_tx*M) x N_ue
        MatrixXcd estimates;
        PrecoderSet precoders;
    };

    Realization draw(std::uint64_t index) const;

    const NetworkStats& network() const { return network_; }
    const ChannelEstimator& estimator() const { return estimator_; }
    double noise_power() const { return noise_power_; }
    double delta() const { return delta_; }
    std::uint64_t trial() const { return trial_; }

private:
    NetworkStats network_;
    ChannelEstimator estimator_;
    double noise_power_ = 0.0;
    double delta_ = 0.0;
    std::uint64_t seed_ = 0;
    std::uint64_t trial_ = 0;
};

/// Sample moments contributed by a single realization.
struct RealizationMoments {
    MatrixXcd cross;        // h_i^H w_j, N_ue x (N_ue+1)
    MatrixXd block_power;   // |w_{j,k}|^2, N_tx x (N_ue+1)
    MatrixXcd c_a;
    MatrixXcd c_b;
};

RealizationMoments realization_moments(const NetworkStats& net, const MonteCarloModel::Realization& r);

struct TrialStatistics {
    CommStatistics comm;
    SensingCovariances sensing;
};

/// Monte Carlo reduction over realizations 0..mc_inner-1. The parallel and
/// serial paths add per-realization moments in index order and therefore
/// return bit-identical results.
TrialStatistics collect_statistics(const MonteCarloModel& model, int mc_inner,
                                   Execution exec = Execution::parallel);

CommStatistics comm_stats(const MonteCarloModel& model, int mc_inner, Execution exec = Execution::parallel);

SensingCovariances sensing_covariances(const PrecoderSet& precoders, const NetworkStats& net);

/// Builds A, B from covariances. Realized mode draws L_d QPSK symbol vectors
/// from `rng`, which may be null in expected mode.
SensingQuadratics sensing_quadratics(const SensingCovariances& cov, int antennas, int n_rx, int data_len,
                                     double noise_power, SymbolMode mode, Engine* rng = nullptr);

SensingQuadratics sensing_matrices(const PrecoderSet& precoders, const NetworkStats& net, int data_len,
                                   double noise_power, SymbolMode mode, Engine& rng);

/// rho^T A rho / (noise_floor + rho^T B rho) for real square-root powers rho.
double sensing_sinr(const VectorXd& rho, const SensingQuadratics& q);

/// SINR bound of UE `ue` (0-based) under square-root powers rho (stream-indexed).
double comm_sinr(const VectorXd& rho, const CommStatistics& stats, int ue);

}  // namespace isac
