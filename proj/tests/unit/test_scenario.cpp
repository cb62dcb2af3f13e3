// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "isac/config_file.hpp"
#include "isac/errors.hpp"
#include "isac/scenario.hpp"

using namespace isac;

namespace {

bool same(const Geometry& a, const Geometry& b)
{
    auto eq = [](const std::vector<Point2>& x, const std::vector<Point2>& y) {
        if (x.size() != y.size()) return false;
        for (std::size_t i = 0; i < x.size(); ++i) {
            if (x[i].x != y[i].x || x[i].y != y[i].y) return false;
        }
        return true;
    };
    return eq(a.tx_aps, b.tx_aps) && eq(a.rx_aps, b.rx_aps) && eq(a.ues, b.ues) && a.target.x == b.target.x &&
           a.target.y == b.target.y;
}

}  // namespace

TEST_CASE("default geometry")
{
    const Scenario sc = build_scenario(SystemConfig{});
    const Geometry& g = sc.geometry();
    REQUIRE(g.tx_aps.size() == 16);
    REQUIRE(g.rx_aps.size() == 2);
    CHECK(g.ues.size() == 8);
    CHECK(g.target.x == 250.0);
    CHECK(g.target.y == 250.0);
    CHECK(g.rx_aps[0].x == 200.0);
    CHECK(g.rx_aps[0].y == 250.0);
    CHECK(g.rx_aps[1].x == 300.0);
    CHECK(g.rx_aps[1].y == 250.0);
    for (int k = 0; k < 16; ++k) {
        CHECK(g.tx_aps[static_cast<std::size_t>(k)].x == doctest::Approx(62.5 + 125.0 * (k % 4)));
        CHECK(g.tx_aps[static_cast<std::size_t>(k)].y == doctest::Approx(62.5 + 125.0 * (k / 4)));
    }
}

TEST_CASE("single AP sits at the centre")
{
    SystemConfig cfg;
    cfg.n_tx_aps = 1;
    cfg.n_ues = 1;
    cfg.rx_radius = 0.0;
    const Scenario sc = build_scenario(cfg);
    CHECK(sc.geometry().tx_aps[0].x == 250.0);
    CHECK(sc.geometry().tx_aps[0].y == 250.0);
}

TEST_CASE("scenario is deterministic")
{
    SystemConfig cfg;
    cfg.ap_layout = ApLayout::random;
    CHECK(same(build_scenario(cfg).geometry(), build_scenario(cfg).geometry()));
    const Scenario sc = build_scenario(SystemConfig{});
    CHECK(same(drop_ues(sc, 0), drop_ues(sc, 0)));
    CHECK(same(drop_ues(sc, 0), sc.geometry()));
    CHECK_FALSE(same(drop_ues(sc, 0), drop_ues(sc, 1)));
    cfg.rng_seed = 2;
    const Scenario other = build_scenario(SystemConfig{});
    CHECK_FALSE(same(drop_ues(build_scenario(cfg), 3), drop_ues(other, 3)));
}

TEST_CASE("UE drops are uniform and respect the exclusion radius")
{
    const Scenario sc = build_scenario(SystemConfig{});
    double sx = 0.0;
    double sy = 0.0;
    int n = 0;
    for (std::uint64_t t = 0; t < 10000; ++t) {
        const Geometry g = drop_ues(sc, t);
        for (const Point2& p : g.ues) {
            REQUIRE(p.x >= 0.0);
            REQUIRE(p.x <= 500.0);
            REQUIRE(p.y >= 0.0);
            REQUIRE(p.y <= 500.0);
            for (const Point2& ap : g.tx_aps) REQUIRE(distance_2d(ap, p) >= 10.0 - 1e-9);
        }
        sx += g.ues[0].x;
        sy += g.ues[0].y;
        ++n;
    }
    CHECK(std::abs(sx / n - 250.0) <= 15.0);
    CHECK(std::abs(sy / n - 250.0) <= 15.0);
}

TEST_CASE("angles round trip")
{
    const Point2 a{10.0, 20.0};
    for (double ang = -3.0; ang <= 3.0; ang += 0.25) {
        const Point2 b{a.x + 40.0 * std::cos(ang), a.y + 40.0 * std::sin(ang)};
        CHECK(std::abs(azimuth(a, b) - ang) <= 1e-12);
    }
    CHECK(elevation({0.0, 0.0}, 10.0, {30.0, 40.0}, 10.0) == 0.0);
    CHECK(elevation({0.0, 0.0}, 10.0, {30.0, 40.0}, 1.5) < 0.0);
    CHECK(distance_3d({0.0, 0.0}, 0.0, {3.0, 4.0}, 12.0) == doctest::Approx(13.0));
}

TEST_CASE("unit conversions")
{
    CHECK(dbm_to_watts(30.0) == doctest::Approx(1.0));
    CHECK(dbm_to_watts(-114.0) == doctest::Approx(3.981071705534972e-15));
    CHECK(db_to_linear(10.0) == doctest::Approx(10.0));
    CHECK(linear_to_db(100.0) == doctest::Approx(20.0));
}

TEST_CASE("config validation")
{
    SystemConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    cfg.area_side = 0.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = SystemConfig{};
    cfg.blocklength = 10;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = SystemConfig{};
    cfg.dep_threshold = {0.5};
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = SystemConfig{};
    cfg.packet_bits = {256.0, 128.0};
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = SystemConfig{};
    cfg.rx_radius = 400.0;
    CHECK_THROWS_AS(build_scenario(cfg), ConfigError);
}

TEST_CASE("config file round trip")
{
    SystemConfig cfg;
    cfg.n_ues = 3;
    cfg.packet_bits = {128.0, 256.0, 512.0};
    cfg.dep_threshold = {1e-6, 1e-5, 1e-4};
    cfg.clutter_split = ClutterGainSplit::even;
    cfg.ap_layout = ApLayout::random;
    cfg.sca.penalty = 3.5;
    std::stringstream ss;
    write_config(ss, cfg);
    const SystemConfig back = parse_config(ss);
    CHECK(back.n_ues == 3);
    CHECK(back.packet_bits == cfg.packet_bits);
    CHECK(back.dep_threshold == cfg.dep_threshold);
    CHECK(back.clutter_split == ClutterGainSplit::even);
    CHECK(back.ap_layout == ApLayout::random);
    CHECK(back.sca.penalty == 3.5);
    CHECK(back.noise_power == doctest::Approx(cfg.noise_power).epsilon(1e-12));
    CHECK(back.sensing_sinr_threshold == doctest::Approx(cfg.sensing_sinr_threshold).epsilon(1e-12));
}

TEST_CASE("config parser errors")
{
    std::istringstream unknown("n_ues = 4\nbogus_key = 1\n");
    CHECK_THROWS_AS(parse_config(unknown), ConfigError);
    std::istringstream bad("n_ues = four\n");
    CHECK_THROWS_AS(parse_config(bad), ConfigError);
    std::istringstream comment("# comment\n\nn_ues = 4  # trailing\n");
    CHECK(parse_config(comment).n_ues == 4);
    SystemConfig cfg;
    CHECK_THROWS_AS(apply_setting(cfg, "clutter_split", "half"), ConfigError);
}
