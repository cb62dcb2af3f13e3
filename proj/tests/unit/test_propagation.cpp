// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "isac/linalg.hpp"
#include "isac/propagation.hpp"
#include "isac/scenario.hpp"

using namespace isac;

namespace {

constexpr double pi = std::numbers::pi;

}  // namespace

TEST_CASE("array response examples")
{
    const VectorXcd a = array_response(0.0, 0.0, 4);
    for (int m = 0; m < 4; ++m) CHECK(std::abs(a(m) - cdouble(1.0, 0.0)) <= 1e-15);
    const VectorXcd b = array_response(pi / 2.0, 0.0, 2);
    CHECK(std::abs(b(1) - cdouble(-1.0, 0.0)) <= 1e-15);
    const VectorXcd c = array_response(pi / 6.0, 0.0, 4);
    const cdouble expect[] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    for (int m = 0; m < 4; ++m) CHECK(std::abs(c(m) - expect[m]) <= 1e-12);
}

TEST_CASE("array response has norm M")
{
    Engine rng = make_stream(3, Stage::geometry, 0);
    for (int n = 0; n < 1000; ++n) {
        const int m = 1 + n % 16;
        const VectorXcd a = array_response(uniform(rng, -pi, pi), uniform(rng, -pi / 2, pi / 2), m);
        REQUIRE(std::abs(a.squaredNorm() - m) <= 1e-12);
    }
}

TEST_CASE("large-scale formulas")
{
    CHECK(los_probability(18.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(los_probability(10.0) == doctest::Approx(1.0).epsilon(1e-15));
    const double d = 100.0;
    CHECK(los_probability(d) == doctest::Approx(0.18 * (1 - std::exp(-d / 36)) + std::exp(-d / 36)).epsilon(1e-14));
    CHECK(pathloss_db(100.0, true) == doctest::Approx(82.18).epsilon(1e-14));
    CHECK(pathloss_db(100.0, false) == doctest::Approx(110.53).epsilon(1e-14));
    CHECK(rician_k(100.0, true) == doctest::Approx(std::pow(10.0, 1.0)).epsilon(1e-14));
    CHECK(rician_k(100.0, false) == 0.0);
    Engine rng = make_stream(1, Stage::shadowing, 0);
    CHECK_THROWS(large_scale(0.0, rng));
}

TEST_CASE("shadowing statistics")
{
    Engine rng = make_stream(5, Stage::shadowing, 0);
    double sum = 0.0;
    double sq = 0.0;
    int los = 0;
    const int n = 40000;
    for (int i = 0; i < n; ++i) {
        const LargeScaleSample s = large_scale(100.0, rng);
        if (s.is_los) {
            ++los;
            continue;
        }
        sum += s.shadowing_db;
        sq += s.shadowing_db * s.shadowing_db;
        CHECK(s.rician_k == 0.0);
    }
    const int nlos = n - los;
    CHECK(std::abs(static_cast<double>(los) / n - los_probability(100.0)) <= 0.01);
    CHECK(std::abs(sum / nlos) <= 0.2);
    CHECK(std::abs(std::sqrt(sq / nlos) - 10.0) <= 0.15);
}

TEST_CASE("local scattering correlation")
{
    const MatrixXcd r0 = local_scattering_corr(0.4, 0.0, 4);
    const VectorXcd a = array_response(0.4, 0.0, 4);
    CHECK((r0 - a * a.adjoint()).norm() <= 1e-12);
    const MatrixXcd r = local_scattering_corr(0.0, 15.0 * pi / 180.0, 4);
    for (int m = 0; m < 4; ++m) CHECK(std::abs(r(m, m) - cdouble(1.0, 0.0)) <= 1e-15);
    CHECK(is_hermitian(r));
    Eigen::SelfAdjointEigenSolver<MatrixXcd> eig(r);
    CHECK(eig.eigenvalues().sum() == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(eig.eigenvalues().minCoeff() >= -1e-12 * eig.eigenvalues().maxCoeff());
}

TEST_CASE("comm channel sampling")
{
    LinkStats pure;
    pure.los_component = VectorXcd::Zero(4);
    pure.los_component(0) = 1.0;
    pure.nlos_corr = MatrixXcd::Zero(4, 4);
    pure.is_los = true;
    Engine rng = make_stream(9, Stage::fading, 0);
    const VectorXcd h = sample_comm_channel(pure, rng);
    CHECK(std::abs(std::abs(h(0)) - 1.0) <= 1e-14);
    CHECK(h.tail(3).norm() <= 1e-14);

    LinkStats white;
    white.los_component = VectorXcd::Zero(4);
    white.nlos_corr = MatrixXcd::Identity(4, 4);
    double energy = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) energy += sample_comm_channel(white, rng).squaredNorm();
    CHECK(std::abs(energy / n - 4.0) <= 0.05);

    Engine r1 = make_stream(2, Stage::fading, 7);
    Engine r2 = make_stream(2, Stage::fading, 7);
    CHECK(sample_comm_channel(white, r1) == sample_comm_channel(white, r2));
}

TEST_CASE("Rician link energy")
{
    LargeScaleSample ls;
    ls.pathloss_db = 0.0;
    ls.is_los = true;
    ls.rician_k = 3.0;
    const LinkStats s = make_link_stats(ls, 0.3, -0.1, 15.0 * pi / 180.0, 4);
    CHECK(s.nlos_corr.trace().real() == doctest::Approx(4.0 * s.beta / 4.0).epsilon(1e-12));
    CHECK(s.los_component.squaredNorm() == doctest::Approx(4.0 * 0.75).epsilon(1e-12));
    Engine rng = make_stream(4, Stage::fading, 0);
    double energy = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) energy += sample_comm_channel(s, rng).squaredNorm();
    const double expect = s.los_component.squaredNorm() + s.nlos_corr.trace().real();
    CHECK(std::abs(energy / n / expect - 1.0) <= 0.01);

    ls.is_los = false;
    const LinkStats nlos = make_link_stats(ls, 0.3, -0.1, 0.2, 4);
    CHECK(nlos.los_component.norm() == 0.0);
}

TEST_CASE("clutter channel sampling")
{
    ClutterStats c;
    c.rx_corr = MatrixXcd::Identity(2, 2);
    c.tx_corr = MatrixXcd::Identity(2, 2);
    Engine rng = make_stream(6, Stage::fading, 0);
    const int n = 100000;
    MatrixXcd cov = MatrixXcd::Zero(4, 4);
    for (int i = 0; i < n; ++i) {
        const MatrixXcd h = sample_clutter_channel(c, rng);
        const Eigen::Map<const VectorXcd> v(h.data(), 4);
        cov += v * v.adjoint();
    }
    cov /= n;
    CHECK((cov - MatrixXcd::Identity(4, 4)).cwiseAbs().maxCoeff() <= 0.02);

    ClutterStats zero;
    zero.rx_corr = MatrixXcd::Zero(3, 3);
    zero.tx_corr = MatrixXcd::Identity(3, 3);
    CHECK(sample_clutter_channel(zero, rng).norm() == 0.0);

    // E|H|_F^2 = tr(R_rx) tr(R_tx)
    const ClutterStats k = make_clutter_stats(0.5, 0.2, -1.0, 0.26, 4, ClutterGainSplit::full);
    double energy = 0.0;
    for (int i = 0; i < n; ++i) energy += sample_clutter_channel(k, rng).squaredNorm();
    const double expect = k.rx_corr.trace().real() * k.tx_corr.trace().real();
    CHECK(std::abs(energy / n / expect - 1.0) <= 0.02);

    Engine r1 = make_stream(2, Stage::fading, 1);
    Engine r2 = make_stream(2, Stage::fading, 1);
    CHECK(sample_clutter_channel(k, r1) == sample_clutter_channel(k, r2));
}

TEST_CASE("clutter gain split")
{
    const ClutterStats full = make_clutter_stats(0.04, 0.1, 0.2, 0.26, 4, ClutterGainSplit::full);
    const ClutterStats even = make_clutter_stats(0.04, 0.1, 0.2, 0.26, 4, ClutterGainSplit::even);
    CHECK(full.rx_corr.trace().real() == doctest::Approx(4.0 * 0.04));
    CHECK(even.rx_corr.trace().real() == doctest::Approx(4.0 * 0.2));
    CHECK(even.tx_corr.trace().real() == doctest::Approx(4.0 * 0.2));
}

TEST_CASE("bistatic gain")
{
    const double base = bistatic_gain(70.7, 70.7, 0.15779, 1.0);
    CHECK(base == doctest::Approx(5.02e-13).epsilon(2e-3));
    CHECK(bistatic_gain(141.4, 70.7, 0.15779, 1.0) == doctest::Approx(base / 4.0).epsilon(1e-12));
    CHECK(bistatic_gain(70.7, 70.7, 0.15779, 0.0) == 0.0);
    CHECK_THROWS(bistatic_gain(0.0, 10.0, 0.15, 1.0));
}

TEST_CASE("network statistics invariants")
{
    const Scenario sc = build_scenario(SystemConfig{});
    for (std::uint64_t trial = 0; trial < 5; ++trial) {
        const NetworkStats net = build_network_stats(sc, drop_ues(sc, trial), trial);
        REQUIRE(net.links.size() == 8u * 16u);
        for (const LinkStats& l : net.links) {
            CHECK(l.beta > 0.0);
            CHECK(is_hermitian(l.nlos_corr));
            CHECK(relative_min_eigenvalue(l.nlos_corr) >= -1e-12);
            CHECK(l.nlos_corr.trace().real() == doctest::Approx(4.0 * l.beta / (l.rician_k + 1.0)).epsilon(1e-10));
            if (!l.is_los) CHECK(l.los_component.norm() == 0.0);
        }
        for (const ClutterStats& c : net.clutter) {
            CHECK(c.gain >= 0.0);
            CHECK(relative_min_eigenvalue(c.rx_corr) >= -1e-12);
            CHECK(relative_min_eigenvalue(c.tx_corr) >= -1e-12);
        }
        CHECK(net.sensing.h0.size() == 64);
        for (const VectorXcd& a : net.sensing.steering) CHECK(std::abs(a.squaredNorm() - 4.0) <= 1e-12);
        CHECK(net.sensing.bistatic.minCoeff() > 0.0);
    }
    const NetworkStats a = build_network_stats(sc, drop_ues(sc, 2), 2);
    const NetworkStats b = build_network_stats(sc, drop_ues(sc, 2), 2);
    CHECK(a.gains() == b.gains());
}
