// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "isac/cli.hpp"
#include "isac/csv.hpp"
#include "isac/errors.hpp"
#include "isac/harness.hpp"
#include "isac/urllc.hpp"

using namespace isac;

namespace {

SystemConfig small_config()
{
    SystemConfig cfg;
    cfg.mc_inner = 100;
    return cfg;
}

HarnessOptions serial_options()
{
    HarnessOptions o;
    o.exec = Execution::serial;
    return o;
}

int cli(std::vector<const char*> args, std::string* out_text = nullptr, std::string* err_text = nullptr)
{
    args.insert(args.begin(), "isac");
    std::ostringstream out;
    std::ostringstream err;
    const int code = run_cli(static_cast<int>(args.size()), args.data(), out, err);
    if (out_text) *out_text = out.str();
    if (err_text) *err_text = err.str();
    return code;
}

}  // namespace

TEST_CASE("Wilson interval")
{
    const WilsonInterval half = wilson_interval(5, 10);
    CHECK(half.low == doctest::Approx(0.2366).epsilon(1e-3));
    CHECK(half.high == doctest::Approx(0.7634).epsilon(1e-3));
    const WilsonInterval none = wilson_interval(0, 20);
    CHECK(none.low == 0.0);
    CHECK(none.high == doctest::Approx(0.1611).epsilon(1e-3));
    const WilsonInterval all = wilson_interval(100, 100);
    CHECK(all.high == 1.0);
    CHECK(all.low == doctest::Approx(0.9630).epsilon(1e-3));
    for (int k = 0; k <= 30; ++k) {
        const WilsonInterval w = wilson_interval(k, 30);
        CHECK(w.low <= k / 30.0);
        CHECK(w.high >= k / 30.0);
    }
}

TEST_CASE("median")
{
    CHECK(median({3.0, 1.0, 2.0}) == 2.0);
    CHECK(median({4.0, 1.0, 2.0, 3.0}) == 2.5);
    CHECK(std::isnan(median({})));
}

TEST_CASE("sweep parsing")
{
    const SweepSpec l = parse_sweep("L=100:20:200");
    CHECK(l.variable == "L");
    CHECK(l.values == std::vector<double>{100, 120, 140, 160, 180, 200});
    const SweepSpec e = parse_sweep("eps=1e-7:1e-3");
    CHECK(e.variable == "eps");
    REQUIRE(e.values.size() == 5);
    CHECK(e.values.front() == doctest::Approx(1e-7));
    CHECK(e.values.back() == doctest::Approx(1e-3));
    const SweepSpec g = parse_sweep("gamma_s=3,10");
    CHECK(g.variable == "gamma_s");
    CHECK(g.values == std::vector<double>{3, 10});
    CHECK_THROWS_AS(parse_sweep("L"), ConfigError);
    CHECK_THROWS_AS(parse_sweep("P=1,2"), ConfigError);
    CHECK_THROWS_AS(parse_sweep("L=100:0:200"), ConfigError);
    CHECK_THROWS_AS(parse_sweep("L=100:200"), ConfigError);
    CHECK_THROWS_AS(parse_sweep("L=1,x"), ConfigError);
    CHECK_THROWS_AS(parse_number_list(""), ConfigError);
}

TEST_CASE("grid points")
{
    const SystemConfig cfg;
    const std::vector<SweepPoint> p = make_points(cfg, parse_sweep("L=140,180"), {}, {3.0, 10.0});
    REQUIRE(p.size() == 4);
    CHECK(p[0].blocklength == 140);
    CHECK(p[1].blocklength == 140);
    CHECK(p[1].gamma_s == doctest::Approx(10.0));
    CHECK(p[2].blocklength == 180);
    CHECK(p[0].dep_threshold == 0.0);
    const std::vector<SweepPoint> e = make_points(cfg, parse_sweep("eps=1e-6,1e-4"), {160}, {});
    REQUIRE(e.size() == 2);
    CHECK(e[1].dep_threshold == 1e-4);
    CHECK(e[1].gamma_s == cfg.sensing_sinr_threshold);
    CHECK_THROWS_AS(make_points(cfg, parse_sweep("L=140.5"), {}, {}), ConfigError);
}

TEST_CASE("trial preparation is independent of the execution mode")
{
    const Scenario sc = build_scenario(small_config());
    const TrialData a = prepare_trial(sc, 3, Execution::serial);
    const TrialData b = prepare_trial(sc, 3, Execution::parallel);
    REQUIRE(a.ok);
    CHECK(a.comm.b == b.comm.b);
    CHECK(a.comm.a == b.comm.a);
    CHECK(a.sensing.c_a == b.sensing.c_a);
    const std::vector<TrialData> all = prepare_trials(sc, 3, Execution::parallel);
    CHECK(all[2].comm.b == prepare_trial(sc, 2).comm.b);
}

TEST_CASE("serial and parallel grids agree and CSV output is reproducible")
{
    const SystemConfig cfg = small_config();
    const std::vector<SweepPoint> points = make_points(cfg, parse_sweep("L=140,180"), {}, {3.0});
    const std::vector<AllocationMode> modes(std::begin(kAllModes), std::end(kAllModes));
    const GridResult a = run_grid(cfg, modes, points, 4, serial_options());
    const GridResult b = run_grid(cfg, modes, points, 4);
    REQUIRE(a.outcomes.size() == b.outcomes.size());
    for (std::size_t i = 0; i < a.outcomes.size(); ++i) {
        CHECK(a.outcomes[i].status == b.outcomes[i].status);
        CHECK(a.outcomes[i].total_power == b.outcomes[i].total_power);
    }
    std::ostringstream x;
    std::ostringstream y;
    write_availability_csv(x, "L", summarize(a));
    write_availability_csv(y, "L", summarize(run_grid(cfg, modes, points, 4)));
    const std::string text = x.str();
    CHECK(text == y.str());
    CHECK(text.rfind("sweep,value,L,gamma_s_db,dep_threshold,mode,trials,feasible,availability", 0) == 0);
    // header plus one row per (point, mode)
    CHECK(std::count(text.begin(), text.end(), '\n') == 7);
}

TEST_CASE("availability does not grow with the sensing threshold")
{
    const SystemConfig cfg = small_config();
    const std::vector<SweepPoint> points = make_points(cfg, parse_sweep("gamma_s=-10,3,10,20,30"), {180}, {});
    const GridResult g = run_grid(cfg, {AllocationMode::seurllc_plus, AllocationMode::seurllc}, points, 6);
    const std::vector<PointSummary> s = summarize(g);
    for (int m = 0; m < 2; ++m) {
        for (std::size_t p = 1; p < points.size(); ++p) {
            CHECK(s[p * 2 + static_cast<std::size_t>(m)].availability <= s[(p - 1) * 2 + static_cast<std::size_t>(m)].availability);
        }
    }
}

TEST_CASE("guaranteed outcomes")
{
    SystemConfig hard = small_config();
    hard.packet_bits = {8000.0};
    const std::vector<SweepPoint> at180{{180, db_to_linear(3.0), 0.0}};
    const std::vector<PointSummary> h = summarize(run_grid(hard, {AllocationMode::urllc_only}, at180, 3));
    CHECK(h[0].availability == 0.0);
    CHECK(h[0].failures_of(FailureClass::comm) == 3);

    SystemConfig easy = small_config();
    easy.packet_bits = {1.0};
    easy.dep_threshold = {0.49};
    easy.blocklength = 100;
    // eps = 0.49 caps the delay-limited blocklength at 102
    const std::vector<SweepPoint> zero{{100, 0.0, 0.0}};
    const std::vector<PointSummary> e = summarize(run_grid(easy, {AllocationMode::seurllc_plus}, zero, 3));
    CHECK(e[0].availability == 1.0);

    const std::vector<SweepPoint> late{{200, db_to_linear(3.0), 0.0}};
    const std::vector<PointSummary> d = summarize(run_grid(small_config(), {AllocationMode::urllc_only}, late, 2));
    CHECK(d[0].availability == 0.0);
    CHECK(d[0].failures_of(FailureClass::delay) == 2);

    CHECK_THROWS_AS(run_grid(small_config(), {AllocationMode::urllc_only}, at180, 0), ConfigError);
    const std::vector<SweepPoint> short_block{{8, 1.0, 0.0}};
    CHECK_THROWS_AS(run_grid(small_config(), {AllocationMode::urllc_only}, short_block, 1), ConfigError);
}

TEST_CASE("energy-efficiency table")
{
    const SystemConfig cfg = small_config();
    const std::vector<SweepPoint> one{{180, db_to_linear(3.0), 0.0}};
    const GridResult g = run_grid(cfg, {AllocationMode::urllc_only}, one, 1);
    const std::vector<EeRow> rows = ee_table(g);
    REQUIRE(rows.size() == 1);
    if (rows[0].feasible == 1) {
        CHECK(rows[0].paired_trials == 1);
        CHECK(rows[0].mean_ee == rows[0].paired_mean_ee);
        CHECK(rows[0].mean_ee > 0.0);
    }
    std::ostringstream out;
    write_ee_csv(out, rows);
    const std::string text = out.str();
    CHECK(std::count(text.begin(), text.end(), '\n') == 2);
}

TEST_CASE("csv numbers")
{
    CHECK(csv_number(0.5) == "0.5");
    CHECK(csv_number(std::nan("")) == "nan");
    CHECK(csv_number(1.0 / 0.0) == "inf");
    std::ostringstream out;
    CsvWriter w(out);
    w.header({"a", "b"});
    w.field(1).field("x");
    w.end_row();
    CHECK(out.str() == "a,b\n1,x\n");
}

TEST_CASE("command line exit codes")
{
    std::string out;
    std::string err;
    CHECK(cli({"selftest"}, &out) == kExitOk);
    CHECK(out.find("FAIL") == std::string::npos);
    CHECK(cli({"availability", "--bogus"}, nullptr, &err) == kExitConfig);
    CHECK_FALSE(err.empty());
    CHECK(cli({"frobnicate"}) == kExitConfig);
    CHECK(cli({"availability", "--trials", "5", "--sweep", "L=1:x"}) == kExitConfig);
    CHECK(cli({"single", "--mode", "everything"}) == kExitConfig);
    CHECK(cli({"single", "--config", "/nonexistent/path.cfg"}) == kExitConfig);
    CHECK(cli({"single", "--set", "n_ues=0"}) == kExitConfig);
    CHECK(cli({"single", "--set", "mc_inner=100", "--mode", "URLLC_only"}, &out) == kExitOk);
    CHECK(out.find("URLLC_only") != std::string::npos);
}
