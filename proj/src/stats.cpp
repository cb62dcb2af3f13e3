// SPDX-License-Identifier: Apache-2.0
#include "isac/stats.hpp"

#include <cmath>
#include <stdexcept>

#include "isac/errors.hpp"

namespace isac {

MonteCarloModel::MonteCarloModel(const Scenario& scenario, NetworkStats network, std::uint64_t trial)
    : network_(std::move(network)),
      estimator_(network_,
                 assign_pilots(network_.n_ues, scenario.config().pilot_len, network_.gains()),
                 scenario.config().pilot_power, scenario.config().pilot_len, scenario.config().noise_power),
      noise_power_(scenario.config().noise_power),
      delta_(rzf_regularization(network_.n_ues, scenario.config().noise_power,
                                scenario.config().max_ap_power)),
      seed_(scenario.config().rng_seed),
      trial_(trial)
{
}

MonteCarloModel::Realization MonteCarloModel::draw(std::uint64_t index) const
{
    const int m = network_.antennas;
    const Eigen::Index dim = static_cast<Eigen::Index>(network_.n_tx) * m;
    Engine rng = make_stream(seed_, Stage::fading, trial_, index);

    Realization r;
    r.channels.resize(dim, network_.n_ues);
    for (int i = 0; i < network_.n_ues; ++i) {
        for (int k = 0; k < network_.n_tx; ++k) {
            r.channels.col(i).segment(static_cast<Eigen::Index>(k) * m, m) =
                sample_comm_channel(network_.link(i, k), rng);
        }
    }
    r.estimates = estimator_.estimate(r.channels, rng);
    r.precoders.antennas = m;
    r.precoders.comm = rzf_precoders(r.estimates, delta_);
    r.precoders.sensing = zf_sensing_precoder(r.estimates, network_.sensing.h0);
    return r;
}

SensingCovariances sensing_covariances(const PrecoderSet& precoders, const NetworkStats& net)
{
    const int streams = precoders.n_streams();
    const int m = precoders.antennas;
    SensingCovariances cov;
    cov.c_a = MatrixXcd::Zero(streams, streams);
    cov.c_b = MatrixXcd::Zero(streams, streams);

    MatrixXcd wk(m, streams);
    for (int k = 0; k < net.n_tx; ++k) {
        const Eigen::Index off = static_cast<Eigen::Index>(k) * m;
        wk.col(0) = precoders.sensing.segment(off, m);
        for (int j = 1; j < streams; ++j) wk.col(j) = precoders.comm.col(j - 1).segment(off, m);

        double beta = 0.0;
        MatrixXcd clutter = MatrixXcd::Zero(m, m);
        for (int r = 0; r < net.n_rx; ++r) {
            beta += net.sensing.bistatic(r, k);
            const ClutterStats& c = net.clutter_of(r, k);
            clutter += c.rx_corr.trace().real() * c.tx_corr.transpose();
        }
        // u_j = a_k^T w_{j,k}
        const Eigen::RowVectorXcd u = net.sensing.steering[static_cast<std::size_t>(k)].transpose() * wk;
        cov.c_a += beta * (u.adjoint() * u);
        cov.c_b += wk.adjoint() * clutter * wk;
    }
    return cov;
}

RealizationMoments realization_moments(const NetworkStats& net, const MonteCarloModel::Realization& r)
{
    const PrecoderSet& p = r.precoders;
    const int n_ues = static_cast<int>(r.channels.cols());
    const int streams = p.n_streams();
    const int m = p.antennas;

    RealizationMoments out;
    out.cross.resize(n_ues, streams);
    out.cross.col(0) = r.channels.adjoint() * p.sensing;
    out.cross.rightCols(streams - 1) = r.channels.adjoint() * p.comm;

    out.block_power.resize(net.n_tx, streams);
    for (int k = 0; k < net.n_tx; ++k) {
        const Eigen::Index off = static_cast<Eigen::Index>(k) * m;
        out.block_power(k, 0) = p.sensing.segment(off, m).squaredNorm();
        for (int j = 1; j < streams; ++j) {
            out.block_power(k, j) = p.comm.col(j - 1).segment(off, m).squaredNorm();
        }
    }
    SensingCovariances cov = sensing_covariances(p, net);
    out.c_a = std::move(cov.c_a);
    out.c_b = std::move(cov.c_b);
    return out;
}

namespace {

struct Accumulator {
    VectorXcd diag_sum;     // sum of h_i^H w_i
    MatrixXd power_sum;     // sum of |h_i^H w_j|^2
    MatrixXd block_sum;
    MatrixXcd c_a_sum;
    MatrixXcd c_b_sum;

    Accumulator(int n_ues, int n_tx)
        : diag_sum(VectorXcd::Zero(n_ues)),
          power_sum(MatrixXd::Zero(n_ues, n_ues + 1)),
          block_sum(MatrixXd::Zero(n_tx, n_ues + 1)),
          c_a_sum(MatrixXcd::Zero(n_ues + 1, n_ues + 1)),
          c_b_sum(MatrixXcd::Zero(n_ues + 1, n_ues + 1))
    {
    }

    void add(const RealizationMoments& mom)
    {
        for (Eigen::Index i = 0; i < diag_sum.size(); ++i) diag_sum(i) += mom.cross(i, i + 1);
        power_sum += mom.cross.cwiseAbs2();
        block_sum += mom.block_power;
        c_a_sum += mom.c_a;
        c_b_sum += mom.c_b;
    }

    TrialStatistics finish(int count, double noise_power) const
    {
        const double inv = 1.0 / count;
        const int n_ues = static_cast<int>(diag_sum.size());
        TrialStatistics t;
        CommStatistics& s = t.comm;
        s.noise_power = noise_power;
        s.realizations = count;
        s.b.resize(n_ues);
        s.b_stderr.resize(n_ues);
        s.a.resize(n_ues, n_ues + 1);
        for (int i = 0; i < n_ues; ++i) {
            s.b(i) = std::abs(diag_sum(i) * inv);
            for (int j = 0; j <= n_ues; ++j) {
                double second = power_sum(i, j) * inv;
                if (j == i + 1) {
                    second -= s.b(i) * s.b(i);
                    if (second < 0.0) {
                        second = 0.0;
                        ++s.clamped;
                    }
                }
                s.a(i, j) = std::sqrt(second);
            }
            s.b_stderr(i) = s.a(i, i + 1) / std::sqrt(static_cast<double>(count));
        }
        s.F = (block_sum * inv).cwiseSqrt();
        t.sensing.c_a = c_a_sum * inv;
        t.sensing.c_b = c_b_sum * inv;
        return t;
    }
};

}  // namespace

TrialStatistics collect_statistics(const MonteCarloModel& model, int mc_inner, Execution exec)
{
    if (mc_inner < 1) {
        throw std::invalid_argument("collect_statistics: need at least one realization");
    }
    const NetworkStats& net = model.network();
    Accumulator acc(net.n_ues, net.n_tx);

    if (exec == Execution::serial) {
        for (int n = 0; n < mc_inner; ++n) {
            acc.add(realization_moments(net, model.draw(static_cast<std::uint64_t>(n))));
        }
    } else {
        std::vector<RealizationMoments> moments(static_cast<std::size_t>(mc_inner));
        bool failed = false;
        std::string failure;
#pragma omp parallel for schedule(static)
        for (int n = 0; n < mc_inner; ++n) {
            try {
                moments[static_cast<std::size_t>(n)] =
                    realization_moments(net, model.draw(static_cast<std::uint64_t>(n)));
            } catch (const std::exception& e) {
#pragma omp critical
                {
                    failed = true;
                    failure = e.what();
                }
            }
        }
        if (failed) {
            throw NumericalError(failure);
        }
        // fixed-order merge keeps the parallel result identical to the serial one
        for (const auto& mom : moments) acc.add(mom);
    }
    return acc.finish(mc_inner, model.noise_power());
}

CommStatistics comm_stats(const MonteCarloModel& model, int mc_inner, Execution exec)
{
    return collect_statistics(model, mc_inner, exec).comm;
}

SensingQuadratics sensing_quadratics(const SensingCovariances& cov, int antennas, int n_rx, int data_len,
                                     double noise_power, SymbolMode mode, Engine* rng)
{
    if (data_len <= 0) {
        throw std::invalid_argument("sensing_quadratics: data length must be positive");
    }
    const Eigen::Index n = cov.c_a.rows();
    SensingQuadratics q;
    q.mode = mode;
    q.noise_floor = static_cast<double>(data_len) * antennas * n_rx * noise_power;
    if (mode == SymbolMode::expected) {
        q.A = MatrixXcd::Zero(n, n);
        q.B = MatrixXcd::Zero(n, n);
        for (Eigen::Index j = 0; j < n; ++j) {
            q.A(j, j) = static_cast<double>(data_len) * antennas * cov.c_a(j, j).real();
            q.B(j, j) = static_cast<double>(data_len) * cov.c_b(j, j).real();
        }
        return q;
    }
    if (rng == nullptr) {
        throw std::invalid_argument("sensing_quadratics: realized mode needs a random stream");
    }
    // sum_m D^H C D with D = diag(s[m]), entry (i,j) scales by conj(s_i) s_j
    MatrixXcd outer = MatrixXcd::Zero(n, n);
    VectorXcd s(n);
    const double amp = 1.0 / std::sqrt(2.0);
    std::bernoulli_distribution bit(0.5);
    for (int m = 0; m < data_len; ++m) {
        for (Eigen::Index j = 0; j < n; ++j) {
            s(j) = cdouble(bit(*rng) ? amp : -amp, bit(*rng) ? amp : -amp);
        }
        outer += s.conjugate() * s.transpose();
    }
    q.A = static_cast<double>(antennas) * outer.cwiseProduct(cov.c_a);
    q.B = outer.cwiseProduct(cov.c_b);
    return q;
}

SensingQuadratics sensing_matrices(const PrecoderSet& precoders, const NetworkStats& net, int data_len,
                                   double noise_power, SymbolMode mode, Engine& rng)
{
    return sensing_quadratics(sensing_covariances(precoders, net), precoders.antennas, net.n_rx, data_len,
                              noise_power, mode, &rng);
}

double sensing_sinr(const VectorXd& rho, const SensingQuadratics& q)
{
    const VectorXcd r = rho.cast<cdouble>();
    const double signal = (r.transpose() * q.A * r).value().real();
    const double clutter = (r.transpose() * q.B * r).value().real();
    return signal / (q.noise_floor + clutter);
}

double comm_sinr(const VectorXd& rho, const CommStatistics& stats, int ue)
{
    const double own = rho(ue + 1) * rho(ue + 1) * stats.b(ue) * stats.b(ue);
    double interference = stats.noise_power;
    for (int j = 0; j < stats.n_streams(); ++j) {
        interference += rho(j) * rho(j) * stats.a(ue, j) * stats.a(ue, j);
    }
    return own / interference;
}

}  // namespace isac
