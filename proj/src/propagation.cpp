// SPDX-License-Identifier: Apache-2.0
#include "isac/propagation.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "isac/errors.hpp"

namespace isac {

using std::numbers::pi;

double los_probability(double distance, const UmiParameters& p)
{
    const double e = std::exp(-distance / p.los_prob_decay);
    return std::min(p.los_prob_near / distance, 1.0) * (1.0 - e) + e;
}

double pathloss_db(double distance, bool los, const UmiParameters& p)
{
    if (!(distance > 0.0)) {
        throw std::invalid_argument("pathloss_db: distance must be positive");
    }
    return los ? p.los_intercept + p.los_slope * std::log10(distance)
               : p.nlos_intercept + p.nlos_slope * std::log10(distance);
}

double rician_k(double distance, bool los, const UmiParameters& p)
{
    return los ? std::pow(10.0, p.k_intercept - p.k_slope * distance) : 0.0;
}

double LargeScaleSample::gain() const { return std::pow(10.0, -(pathloss_db - shadowing_db) / 10.0); }

LargeScaleSample large_scale(double distance, Engine& rng, const UmiParameters& p)
{
    if (!(distance > 0.0)) {
        throw std::invalid_argument("large_scale: distance must be positive");
    }
    LargeScaleSample s;
    s.is_los = uniform(rng, 0.0, 1.0) < los_probability(distance, p);
    s.pathloss_db = pathloss_db(distance, s.is_los, p);
    s.shadowing_db = (s.is_los ? p.shadow_std_los : p.shadow_std_nlos) * standard_normal(rng);
    s.rician_k = rician_k(distance, s.is_los, p);
    return s;
}

VectorXcd array_response(double azimuth, double elevation, int antennas)
{
    VectorXcd a(antennas);
    const double phase = pi * std::sin(azimuth) * std::cos(elevation);
    for (int m = 0; m < antennas; ++m) {
        a(m) = std::polar(1.0, m * phase);
    }
    return a;
}

MatrixXcd local_scattering_corr(double nominal_azimuth, double asd, int antennas)
{
    MatrixXcd r(antennas, antennas);
    const double s = std::sin(nominal_azimuth);
    const double c = std::cos(nominal_azimuth);
    for (int l = 0; l < antennas; ++l) {
        for (int m = 0; m < antennas; ++m) {
            const double dist = l - m;
            const double spread = pi * dist * c;
            r(l, m) = std::polar(std::exp(-0.5 * asd * asd * spread * spread), pi * dist * s);
        }
    }
    return r;
}

MatrixXcd LinkStats::total_corr() const
{
    return los_component * los_component.adjoint() + nlos_corr;
}

LinkStats make_link_stats(const LargeScaleSample& ls, double azimuth, double elevation, double asd,
                          int antennas)
{
    LinkStats s;
    s.beta = ls.gain();
    s.rician_k = ls.is_los ? ls.rician_k : 0.0;
    s.is_los = ls.is_los;
    const double k = s.rician_k;
    const double los_power = s.is_los ? s.beta * k / (k + 1.0) : 0.0;
    const double nlos_power = s.beta / (k + 1.0);
    s.los_component = std::sqrt(los_power) * array_response(azimuth, elevation, antennas);
    s.nlos_corr = nlos_power * local_scattering_corr(azimuth, asd, antennas);
    s.nlos_sqrt = hermitian_sqrt(s.nlos_corr);
    return s;
}

VectorXcd sample_comm_channel(const LinkStats& stats, Engine& rng)
{
    const Eigen::Index m = stats.nlos_corr.rows();
    const MatrixXcd root = stats.nlos_sqrt.size() == stats.nlos_corr.size()
                               ? stats.nlos_sqrt
                               : hermitian_sqrt(stats.nlos_corr);
    const double psi = uniform(rng, 0.0, 2.0 * pi);
    VectorXcd z(m);
    for (Eigen::Index i = 0; i < m; ++i) z(i) = circular_normal(rng);
    VectorXcd h = root * z;
    if (stats.los_component.size() == m) {
        h += std::polar(1.0, psi) * stats.los_component;
    }
    return h;
}

ClutterStats make_clutter_stats(double gain, double rx_azimuth, double tx_azimuth, double asd,
                                int antennas, ClutterGainSplit split)
{
    ClutterStats c;
    c.gain = gain;
    const double factor = split == ClutterGainSplit::even ? std::sqrt(gain) : gain;
    c.rx_corr = factor * local_scattering_corr(rx_azimuth, asd, antennas);
    c.tx_corr = factor * local_scattering_corr(tx_azimuth, asd, antennas);
    c.rx_sqrt = hermitian_sqrt(c.rx_corr);
    c.tx_sqrt = hermitian_sqrt(c.tx_corr);
    return c;
}

MatrixXcd sample_clutter_channel(const ClutterStats& c, Engine& rng)
{
    const MatrixXcd rx = c.rx_sqrt.size() == c.rx_corr.size() ? c.rx_sqrt : hermitian_sqrt(c.rx_corr);
    const MatrixXcd tx = c.tx_sqrt.size() == c.tx_corr.size() ? c.tx_sqrt : hermitian_sqrt(c.tx_corr);
    MatrixXcd w(rx.cols(), tx.cols());
    for (Eigen::Index j = 0; j < w.cols(); ++j) {
        for (Eigen::Index i = 0; i < w.rows(); ++i) {
            w(i, j) = circular_normal(rng);
        }
    }
    return rx * w * tx.transpose();
}

double bistatic_gain(double d_tx, double d_rx, double wavelength, double rcs_variance)
{
    if (!(d_tx > 0.0 && d_rx > 0.0)) {
        throw std::invalid_argument("bistatic_gain: distances must be positive");
    }
    const double four_pi = 4.0 * pi;
    return wavelength * wavelength * rcs_variance /
           (four_pi * four_pi * four_pi * d_tx * d_tx * d_rx * d_rx);
}

MatrixXd NetworkStats::gains() const
{
    MatrixXd g(n_ues, n_tx);
    for (int i = 0; i < n_ues; ++i) {
        for (int k = 0; k < n_tx; ++k) {
            g(i, k) = link(i, k).beta;
        }
    }
    return g;
}

NetworkStats build_network_stats(const Scenario& scenario, const Geometry& geometry, std::uint64_t trial,
                                 const UmiParameters& umi)
{
    const SystemConfig& cfg = scenario.config();
    const int m = cfg.antennas_per_ap;
    const double asd = cfg.angular_spread_deg * pi / 180.0;

    NetworkStats net;
    net.n_tx = static_cast<int>(geometry.tx_aps.size());
    net.n_rx = static_cast<int>(geometry.rx_aps.size());
    net.n_ues = static_cast<int>(geometry.ues.size());
    net.antennas = m;

    Engine shadow = scenario.stream(Stage::shadowing, trial);
    net.links.reserve(static_cast<std::size_t>(net.n_ues * net.n_tx));
    for (int i = 0; i < net.n_ues; ++i) {
        for (int k = 0; k < net.n_tx; ++k) {
            const Point2 ap = geometry.tx_aps[static_cast<std::size_t>(k)];
            const Point2 ue = geometry.ues[static_cast<std::size_t>(i)];
            const double d = distance_3d(ap, geometry.ap_height, ue, geometry.ue_height);
            const LargeScaleSample ls = large_scale(d, shadow, umi);
            net.links.push_back(make_link_stats(ls, azimuth(ap, ue),
                                                elevation(ap, geometry.ap_height, ue, geometry.ue_height),
                                                asd, m));
        }
    }

    net.clutter.reserve(static_cast<std::size_t>(net.n_rx * net.n_tx));
    for (int r = 0; r < net.n_rx; ++r) {
        for (int k = 0; k < net.n_tx; ++k) {
            const Point2 rx = geometry.rx_aps[static_cast<std::size_t>(r)];
            const Point2 tx = geometry.tx_aps[static_cast<std::size_t>(k)];
            const double d = std::max(distance_3d(tx, geometry.ap_height, rx, geometry.ap_height), 1.0);
            const double gain = cfg.clutter_scaling * std::pow(10.0, -pathloss_db(d, false, umi) / 10.0);
            net.clutter.push_back(
                make_clutter_stats(gain, azimuth(rx, tx), azimuth(tx, rx), asd, m, cfg.clutter_split));
        }
    }

    SensingChannel& s = net.sensing;
    s.h0.resize(static_cast<Eigen::Index>(net.n_tx) * m);
    s.direct_gain.resize(net.n_tx);
    s.bistatic.resize(net.n_rx, net.n_tx);
    for (int k = 0; k < net.n_tx; ++k) {
        const Point2 tx = geometry.tx_aps[static_cast<std::size_t>(k)];
        const double d_tx = distance_3d(tx, geometry.ap_height, geometry.target, geometry.target_height);
        const VectorXcd a = array_response(azimuth(tx, geometry.target),
                                           elevation(tx, geometry.ap_height, geometry.target,
                                                     geometry.target_height),
                                           m);
        s.steering.push_back(a);
        s.direct_gain(k) = std::pow(10.0, -pathloss_db(d_tx, true, umi) / 10.0);
        // the target sees a^T x, so the matched direction is conj(a)
        s.h0.segment(static_cast<Eigen::Index>(k) * m, m) = std::sqrt(s.direct_gain(k)) * a.conjugate();
        for (int r = 0; r < net.n_rx; ++r) {
            const double d_rx = distance_3d(geometry.target, geometry.target_height,
                                            geometry.rx_aps[static_cast<std::size_t>(r)], geometry.ap_height);
            s.bistatic(r, k) = bistatic_gain(d_tx, std::max(d_rx, 1.0), cfg.wavelength(), cfg.rcs_variance);
        }
    }
    return net;
}

}  // namespace isac
