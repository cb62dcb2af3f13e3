// SPDX-License-Identifier: Apache-2.0
#include "isac/precoding.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "isac/errors.hpp"

namespace isac {

bool PilotAssignment::shared() const
{
    return std::any_of(groups.begin(), groups.end(), [](const auto& g) { return g.size() > 1; });
}

PilotAssignment assign_pilots(int n_ues, int pilot_len, const MatrixXd& gains)
{
    if (pilot_len < 1) {
        throw std::invalid_argument("assign_pilots: need at least one pilot");
    }
    PilotAssignment out;
    out.pilot_of_ue.assign(static_cast<std::size_t>(n_ues), -1);
    out.groups.resize(static_cast<std::size_t>(pilot_len));

    if (n_ues <= pilot_len) {
        for (int i = 0; i < n_ues; ++i) {
            out.pilot_of_ue[static_cast<std::size_t>(i)] = i;
            out.groups[static_cast<std::size_t>(i)].push_back(i);
        }
        return out;
    }

    std::vector<int> order(static_cast<std::size_t>(n_ues));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return gains.row(a).maxCoeff() > gains.row(b).maxCoeff(); });

    for (std::size_t n = 0; n < order.size(); ++n) {
        const int ue = order[n];
        int pilot = 0;
        if (n < static_cast<std::size_t>(pilot_len)) {
            pilot = static_cast<int>(n);
        } else {
            Eigen::Index master = 0;
            gains.row(ue).maxCoeff(&master);
            double best = std::numeric_limits<double>::infinity();
            for (int t = 0; t < pilot_len; ++t) {
                double load = 0.0;
                for (int j : out.groups[static_cast<std::size_t>(t)]) load += gains(j, master);
                if (load < best) {
                    best = load;
                    pilot = t;
                }
            }
        }
        out.pilot_of_ue[static_cast<std::size_t>(ue)] = pilot;
        out.groups[static_cast<std::size_t>(pilot)].push_back(ue);
    }
    for (auto& g : out.groups) std::sort(g.begin(), g.end());
    return out;
}

VectorXcd lmmse_estimate(const VectorXcd& pilot_obs, const MatrixXcd& own_corr,
                         const MatrixXcd& sharing_corr_sum, double pilot_power, int pilot_len,
                         double noise_power)
{
    const double gain = pilot_power * pilot_len;
    const Eigen::Index m = own_corr.rows();
    MatrixXcd psi = gain * (own_corr + sharing_corr_sum) + noise_power * MatrixXcd::Identity(m, m);
    Eigen::LDLT<MatrixXcd> ldlt(psi);
    if (ldlt.info() != Eigen::Success) {
        throw NumericalError("lmmse_estimate: singular pilot Gram matrix");
    }
    return std::sqrt(gain) * own_corr * ldlt.solve(pilot_obs);
}

ChannelEstimator::ChannelEstimator(const NetworkStats& net, PilotAssignment pilots, double pilot_power,
                                   int pilot_len, double noise_power)
    : n_tx_(net.n_tx),
      n_ues_(net.n_ues),
      antennas_(net.antennas),
      pilot_scale_(std::sqrt(pilot_power * pilot_len)),
      noise_power_(noise_power),
      pilots_(std::move(pilots))
{
    const double gain = pilot_power * pilot_len;
    const Eigen::Index m = antennas_;
    filters_.resize(static_cast<std::size_t>(n_ues_ * n_tx_));
    own_corr_.resize(filters_.size());
    for (int k = 0; k < n_tx_; ++k) {
        for (const auto& group : pilots_.groups) {
            if (group.empty()) continue;
            MatrixXcd psi = noise_power * MatrixXcd::Identity(m, m);
            for (int j : group) psi += gain * net.link(j, k).total_corr();
            const MatrixXcd psi_inv = psi.ldlt().solve(MatrixXcd::Identity(m, m));
            for (int i : group) {
                const std::size_t idx = static_cast<std::size_t>(i * n_tx_ + k);
                own_corr_[idx] = net.link(i, k).total_corr();
                filters_[idx] = std::sqrt(gain) * own_corr_[idx] * psi_inv;
            }
        }
    }
}

MatrixXcd ChannelEstimator::estimate(const MatrixXcd& channels, Engine& rng) const
{
    const Eigen::Index m = antennas_;
    MatrixXcd est(channels.rows(), channels.cols());
    VectorXcd y(m);
    for (std::size_t t = 0; t < pilots_.groups.size(); ++t) {
        const auto& group = pilots_.groups[t];
        if (group.empty()) continue;
        for (int k = 0; k < n_tx_; ++k) {
            const Eigen::Index off = static_cast<Eigen::Index>(k) * m;
            y.setZero();
            for (int j : group) y += pilot_scale_ * channels.col(j).segment(off, m);
            const double sd = std::sqrt(noise_power_);
            for (Eigen::Index a = 0; a < m; ++a) y(a) += sd * circular_normal(rng);
            for (int i : group) {
                est.col(i).segment(off, m) = filters_[static_cast<std::size_t>(i * n_tx_ + k)] * y;
            }
        }
    }
    return est;
}

MatrixXcd ChannelEstimator::error_covariance(int ue, int ap) const
{
    const std::size_t idx = static_cast<std::size_t>(ue * n_tx_ + ap);
    const MatrixXcd& r = own_corr_[idx];
    // C = R - sqrt(pL) * F * R, with F = sqrt(pL) R Psi^{-1}
    return r - pilot_scale_ * filters_[idx] * r;
}

double rzf_regularization(int n_ues, double noise_power, double max_ap_power)
{
    return n_ues * noise_power / max_ap_power;
}

MatrixXcd rzf_precoders(const MatrixXcd& estimates, double delta)
{
    const Eigen::Index n = estimates.cols();
    MatrixXcd gram = estimates.adjoint() * estimates;
    gram += delta * MatrixXcd::Identity(n, n);
    // (H H^H + delta I)^{-1} H = H (H^H H + delta I)^{-1}
    Eigen::LDLT<MatrixXcd> ldlt(gram);
    if (ldlt.info() != Eigen::Success || (delta <= 0.0 && !ldlt.isPositive())) {
        throw NumericalError("rzf_precoders: singular Gram matrix");
    }
    MatrixXcd w = estimates * ldlt.solve(MatrixXcd::Identity(n, n));
    for (Eigen::Index i = 0; i < n; ++i) {
        const double norm = w.col(i).norm();
        if (!(norm > 0.0) || !std::isfinite(norm)) {
            throw NumericalError("rzf_precoders: zero precoder");
        }
        w.col(i) /= norm;
    }
    return w;
}

VectorXcd zf_sensing_precoder(const MatrixXcd& estimates, const VectorXcd& h0)
{
    // orthonormal basis by modified Gram-Schmidt, applied twice
    std::vector<VectorXcd> basis;
    for (Eigen::Index i = 0; i < estimates.cols(); ++i) {
        VectorXcd v = estimates.col(i);
        const double norm0 = v.norm();
        if (!(norm0 > 0.0)) continue;
        for (int pass = 0; pass < 2; ++pass) {
            for (const auto& u : basis) v -= u * u.dot(v);
        }
        const double norm = v.norm();
        if (norm > 1e-12 * norm0) basis.push_back(v / norm);
    }

    VectorXcd w = h0;
    for (int pass = 0; pass < 2; ++pass) {
        for (const auto& u : basis) w -= u * u.dot(w);
    }
    const double norm = w.norm();
    if (!(norm >= 1e-9 * h0.norm()) || norm == 0.0) {
        throw DegenerateProjection("sensing direction lies in the span of the UE estimates");
    }
    return w / norm;
}

}  // namespace isac
