// SPDX-License-Identifier: Apache-2.0
#include "isac/selftest.hpp"

#include <cmath>
#include <functional>
#include <ostream>
#include <sstream>
#include <string>

#include "isac/allocator.hpp"
#include "isac/config_file.hpp"
#include "isac/precoding.hpp"
#include "isac/propagation.hpp"
#include "isac/scenario.hpp"
#include "isac/socp.hpp"
#include "isac/stats.hpp"
#include "isac/urllc.hpp"

namespace isac {

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

bool check_golden_values()
{
    const double gamma = sinr_threshold(1e-5, 180, 10, 256);
    const double oracle = std::expm1(bisect_q_inverse(1e-5) / std::sqrt(170.0) + 256.0 * std::log(2.0) / 170.0);
    UrllcTargets t;
    t.packet_bits = {256};
    t.dep_threshold = {1e-5};
    t.delay_threshold = {1e-3};
    t.blocklength = 180;
    t.pilot_len = 10;
    t.bandwidth = 200e3;
    return std::abs(gamma - 2.939) <= 0.005 * 2.939 && std::abs(gamma - oracle) <= 1e-9 * oracle &&
           max_blocklength(t) == 199 && std::abs(delay_upper_bound(180, 200e3, 1e-5) / 0.900009e-3 - 1.0) <= 1e-9;
}

bool check_inverse_pair()
{
    Engine rng = make_stream(7, Stage::symbols, 0);
    for (int n = 0; n < 200; ++n) {
        const double eps = std::pow(10.0, uniform(rng, -9.0, -1.0));
        const int l = 20 + static_cast<int>(uniform(rng, 0.0, 300.0));
        const double bits = uniform(rng, 8.0, 512.0);
        const double back = dep_upper_bound(sinr_threshold(eps, l, 10, bits), l, 10, bits);
        if (std::abs(back - eps) > 1e-9 * eps) {
            return false;
        }
    }
    return true;
}

bool check_socp()
{
    SocProblem p;
    p.objective = VectorXd::Ones(1);
    SocConstraint c;
    c.a = MatrixXd::Zero(2, 1);
    c.b = (VectorXd(2) << 3.0, 4.0).finished();
    c.c = VectorXd::Ones(1);
    p.cones.push_back(c);
    const SocSolution s = solve_socp(p);
    if (s.status != SocStatus::optimal || std::abs(s.x(0) - 5.0) > 1e-8) {
        return false;
    }

    const VectorXd cost = (VectorXd(3) << 1.0, -2.0, 0.5).finished();
    const VectorXd centre = (VectorXd(3) << 1.0, 2.0, 3.0).finished();
    SocProblem ball;
    ball.objective = cost;
    SocConstraint k;
    k.a = MatrixXd::Identity(3, 3);
    k.b = -centre;
    k.c = VectorXd::Zero(3);
    k.d = 2.0;
    ball.cones.push_back(k);
    const SocSolution b = solve_socp(ball);
    return b.status == SocStatus::optimal && (b.x - (centre - 2.0 * cost / cost.norm())).norm() <= 1e-8;
}

bool check_zf_nulling()
{
    SystemConfig cfg;
    cfg.mc_inner = 4;
    const Scenario sc = build_scenario(cfg);
    const NetworkStats net = build_network_stats(sc, drop_ues(sc, 0), 0);
    const MonteCarloModel model(sc, net, 0);
    for (std::uint64_t r = 0; r < 4; ++r) {
        const auto real = model.draw(r);
        for (int i = 0; i < real.estimates.cols(); ++i) {
            const double leak = std::abs(real.estimates.col(i).dot(real.precoders.sensing));
            if (leak > 1e-10 * real.estimates.col(i).norm()) {
                return false;
            }
        }
    }
    return true;
}

bool check_single_ue_allocation()
{
    CommStatistics st;
    st.b = VectorXd::Constant(1, 2e-6);
    st.a = MatrixXd::Zero(1, 2);
    st.F = MatrixXd::Ones(1, 2);
    st.noise_power = 1e-13;
    SensingQuadratics q;
    q.A = MatrixXcd::Zero(2, 2);
    q.B = MatrixXcd::Zero(2, 2);
    q.noise_floor = 1.0;
    AllocationTargets t;
    t.gamma_c = VectorXd::Constant(1, sinr_threshold(1e-5, 180, 10, 256));
    t.max_ap_power = 0.1;
    t.urllc.packet_bits = {256};
    t.urllc.dep_threshold = {1e-5};
    t.urllc.delay_threshold = {1e-3};
    t.urllc.blocklength = 180;
    t.urllc.pilot_len = 10;
    t.urllc.bandwidth = 200e3;
    const PowerAllocation a = fpp_sca(st, q, t, AllocationMode::urllc_only, ScaParams{});
    const double expected = t.gamma_c(0) * st.noise_power / (st.b(0) * st.b(0));
    return a.status == AllocationStatus::feasible && a.iterations <= 5 &&
           std::abs(a.rho(1) * a.rho(1) / expected - 1.0) <= 1e-6;
}

bool check_config_round_trip()
{
    SystemConfig cfg;
    cfg.n_ues = 3;
    cfg.packet_bits = {128, 256, 512};
    cfg.clutter_scaling = 0.25;
    std::stringstream ss;
    write_config(ss, cfg);
    const SystemConfig back = parse_config(ss);
    return back.n_ues == 3 && back.packet_bits == cfg.packet_bits && back.clutter_scaling == 0.25 &&
           std::abs(back.noise_power / cfg.noise_power - 1.0) < 1e-12;
}

}  // namespace

bool run_selftest(std::ostream& out)
{
    const std::pair<const char*, std::function<bool()>> checks[] = {
        {"urllc golden values", check_golden_values},
        {"urllc inverse pair", check_inverse_pair},
        {"socp analytic instances", check_socp},
        {"zf sensing nulling", check_zf_nulling},
        {"single-UE allocation", check_single_ue_allocation},
        {"config round trip", check_config_round_trip},
    };
    bool all = true;
    for (const auto& [name, fn] : checks) {
        bool ok = false;
        std::string note;
        try {
            ok = fn();
        } catch (const std::exception& e) {
            note = std::string(" (") + e.what() + ")";
        }
        out << (ok ? "PASS " : "FAIL ") << name << note << '\n';
        all = all && ok;
    }
    return all;
}

}  // namespace isac
