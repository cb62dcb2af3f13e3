// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "isac/errors.hpp"
#include "isac/rng.hpp"
#include "isac/urllc.hpp"

using namespace isac;

namespace {

double bisect_q_inverse(double p)
{
    double lo = -40.0;
    double hi = 40.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (q_function(mid) > p ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

// composite Simpson on [x, x + 12] of the standard normal density
double q_quadrature(double x)
{
    const int n = 20000;
    const double h = 12.0 / n;
    double sum = 0.0;
    for (int i = 0; i <= n; ++i) {
        const double t = x + i * h;
        const double f = std::exp(-0.5 * t * t);
        sum += f * (i == 0 || i == n ? 1.0 : (i % 2 ? 4.0 : 2.0));
    }
    return sum * h / 3.0 / std::sqrt(2.0 * std::acos(-1.0));
}

UrllcTargets uniform_targets(int n, double eps, double delay)
{
    UrllcTargets t;
    t.packet_bits.assign(static_cast<std::size_t>(n), 256.0);
    t.dep_threshold.assign(static_cast<std::size_t>(n), eps);
    t.delay_threshold.assign(static_cast<std::size_t>(n), delay);
    t.blocklength = 180;
    t.pilot_len = 10;
    t.bandwidth = 200e3;
    return t;
}

}  // namespace

TEST_CASE("q_function symmetry and half point")
{
    CHECK(q_function(0.0) == doctest::Approx(0.5).epsilon(1e-15));
    for (double x : {0.1, 1.0, 2.5, 4.0, 7.5}) {
        CHECK(std::abs(q_function(x) + q_function(-x) - 1.0) <= 1e-14);
    }
}

TEST_CASE("q_function matches quadrature")
{
    const double q = q_function(4.26489);
    CHECK(std::abs(q / q_quadrature(4.26489) - 1.0) <= 1e-9);
    CHECK(std::abs(q - 1e-5) <= 1e-9);
    for (double x : {0.5, 1.5, 3.0, 5.0}) {
        CHECK(std::abs(q_function(x) / q_quadrature(x) - 1.0) <= 1e-9);
    }
}

TEST_CASE("q_inverse round trip and domain")
{
    CHECK(q_inverse(0.5) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(std::abs(q_inverse(1e-5) - 4.26489) <= 1e-4);
    CHECK(std::abs(q_inverse(1e-5) - bisect_q_inverse(1e-5)) <= 1e-12);
    for (int n = 0; n < 1000; ++n) {
        const double p = std::pow(10.0, -15.0 + 15.0 * n / 1000.0);
        CHECK(std::abs(q_function(q_inverse(p)) - p) <= 1e-12 * p);
    }
    CHECK_THROWS_AS(q_inverse(0.0), std::domain_error);
    CHECK_THROWS_AS(q_inverse(1.0), std::domain_error);
    CHECK_THROWS_AS(q_inverse(-0.1), std::domain_error);
}

TEST_CASE("dep bound examples")
{
    const double half = std::exp2(256.0 / 170.0) - 1.0;
    CHECK(half == doctest::Approx(1.840).epsilon(1e-4));
    CHECK(dep_upper_bound(half, 180, 10, 256) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(dep_upper_bound(1e12, 180, 10, 256) < 1e-300);
    CHECK(std::abs(dep_upper_bound(2.939, 180, 10, 256) / 1e-5 - 1.0) <= 0.02);
}

TEST_CASE("sinr threshold examples")
{
    CHECK(sinr_threshold(0.5, 180, 10, 256) == doctest::Approx(std::exp2(256.0 / 170.0) - 1.0).epsilon(1e-14));
    const double gamma = sinr_threshold(1e-5, 180, 10, 256);
    const double oracle = std::expm1(bisect_q_inverse(1e-5) / std::sqrt(170.0) + 256.0 * std::log(2.0) / 170.0);
    CHECK(std::abs(gamma / 2.939 - 1.0) <= 0.005);
    CHECK(std::abs(gamma / oracle - 1.0) <= 1e-12);
}

TEST_CASE("dep and threshold form an inverse pair")
{
    Engine rng = make_stream(11, Stage::symbols, 0);
    for (int n = 0; n < 1000; ++n) {
        const double eps = std::pow(10.0, uniform(rng, -9.0, -1.0));
        const int l = 12 + static_cast<int>(uniform(rng, 0.0, 400.0));
        const double bits = uniform(rng, 8.0, 1024.0);
        const double back = dep_upper_bound(sinr_threshold(eps, l, 10, bits), l, 10, bits);
        REQUIRE(std::abs(back - eps) <= 1e-9 * eps);
    }
}

TEST_CASE("monotonicity on grids")
{
    // values that round to 1 or underflow to 0 carry no order information
    auto resolved = [](double d) { return d > 1e-300 && d < 1.0 - 1e-15; };
    for (int l = 20; l <= 300; l += 20) {
        double prev = 1.0;
        for (double s = 0.5; s <= 20.0; s += 0.5) {
            const double d = dep_upper_bound(s, l, 10, 256);
            if (resolved(d) && resolved(prev)) CHECK(d < prev);
            CHECK(d <= prev);
            prev = d;
        }
        CHECK(sinr_threshold(1e-5, l + 20, 10, 256) < sinr_threshold(1e-5, l, 10, 256));
        CHECK(sinr_threshold(1e-5, l, 10, 300) > sinr_threshold(1e-5, l, 10, 256));
    }
    // strictly decreasing in L above the half point
    for (double s : {2.5, 3.0, 5.0}) {
        double prev = 1.0;
        for (int l = 200; l <= 400; l += 10) {
            const double d = dep_upper_bound(s, l, 10, 256);
            CHECK(resolved(d));
            CHECK(d < prev);
            prev = d;
        }
    }
}

TEST_CASE("delay bound")
{
    CHECK(delay_upper_bound(180, 200e3, 0.0) == doctest::Approx(180.0 / 200e3).epsilon(1e-15));
    CHECK(std::abs(delay_upper_bound(180, 200e3, 1e-5) / 0.900009e-3 - 1.0) <= 1e-9);
    CHECK(delay_upper_bound(180, 200e3, 1e-3) > delay_upper_bound(180, 200e3, 1e-5));
    CHECK_THROWS(delay_upper_bound(180, 200e3, 1.0));
}

TEST_CASE("max blocklength")
{
    CHECK(max_blocklength(uniform_targets(8, 1e-5, 1e-3)) == 199);
    CHECK(max_blocklength(uniform_targets(1, 0.0, 1e-3)) == 200);
    UrllcTargets mixed = uniform_targets(3, 1e-5, 1e-3);
    mixed.delay_threshold[1] = 0.5e-3;
    CHECK(max_blocklength(mixed) == 99);
    CHECK_THROWS_AS(max_blocklength(uniform_targets(2, 1e-5, 1e-5)), ConfigError);
}

TEST_CASE("energy efficiency")
{
    UrllcTargets t = uniform_targets(8, 1e-5, 1e-3);
    const Eigen::VectorXd one = Eigen::VectorXd::Constant(1, 1.0);
    CHECK(std::abs(energy_efficiency(one, t) / 2.4094e6 - 1.0) <= 1e-4);
    const Eigen::VectorXd two = Eigen::VectorXd::Constant(1, std::sqrt(2.0));
    CHECK(energy_efficiency(two, t) == doctest::Approx(energy_efficiency(one, t) / 2.0).epsilon(1e-14));
    t.dep_threshold.assign(8, 0.0);
    CHECK(energy_efficiency(one, t) == doctest::Approx(200e3 * 2048.0 / 170.0).epsilon(1e-14));
    CHECK_THROWS_AS(energy_efficiency(Eigen::VectorXd::Zero(3), t), std::invalid_argument);
}
