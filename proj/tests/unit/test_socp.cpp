// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "isac/rng.hpp"
#include "isac/socp.hpp"
#include "socp_oracle.hpp"

using namespace isac;

namespace {

SocConstraint linear(const VectorXd& c, double d)
{
    SocConstraint k;
    k.a = MatrixXd::Zero(0, c.size());
    k.b = VectorXd::Zero(0);
    k.c = c;
    k.d = d;
    return k;
}

SocProblem ball_lp(const VectorXd& cost, const VectorXd& centre, double radius)
{
    SocProblem p;
    p.objective = cost;
    SocConstraint k;
    k.a = MatrixXd::Identity(cost.size(), cost.size());
    k.b = -centre;
    k.c = VectorXd::Zero(cost.size());
    k.d = radius;
    p.cones.push_back(k);
    return p;
}

}  // namespace

TEST_CASE("constant norm")
{
    SocProblem p;
    p.objective = VectorXd::Ones(1);
    SocConstraint c;
    c.a = MatrixXd::Zero(2, 1);
    c.b = (VectorXd(2) << 3.0, 4.0).finished();
    c.c = VectorXd::Ones(1);
    p.cones.push_back(c);
    const SocSolution s = solve_socp(p);
    REQUIRE(s.status == SocStatus::optimal);
    CHECK(std::abs(s.x(0) - 5.0) <= 1e-8);
}

TEST_CASE("ball-constrained LP")
{
    const VectorXd cost = (VectorXd(2) << 0.6, -0.8).finished();
    const VectorXd centre = (VectorXd(2) << 1.0, -2.0).finished();
    const SocSolution s = solve_socp(ball_lp(cost, centre, 1.5));
    REQUIRE(s.status == SocStatus::optimal);
    const VectorXd expect = centre - 1.5 * cost / cost.norm();
    CHECK((s.x - expect).norm() <= 1e-8);

    // grid search over the boundary circle
    double best = 1e300;
    for (int i = 0; i < 100000; ++i) {
        const double th = 2.0 * 3.141592653589793 * i / 100000.0;
        const VectorXd x = centre + 1.5 * (VectorXd(2) << std::cos(th), std::sin(th)).finished();
        best = std::min(best, cost.dot(x));
    }
    CHECK(std::abs(s.objective - best) <= 1e-8);

    Engine rng = make_stream(4, Stage::symbols, 0);
    for (int rep = 0; rep < 20; ++rep) {
        const int n = 2 + rep % 10;
        VectorXd c(n);
        VectorXd x0(n);
        for (int j = 0; j < n; ++j) {
            c(j) = standard_normal(rng);
            x0(j) = standard_normal(rng);
        }
        const SocSolution r = solve_socp(ball_lp(c, x0, 2.0));
        REQUIRE(r.status == SocStatus::optimal);
        CHECK((r.x - (x0 - 2.0 * c / c.norm())).norm() <= 1e-8);
    }
}

TEST_CASE("norm epigraph over a halfspace")
{
    const int n = 5;
    SocProblem p;
    p.objective = VectorXd::Unit(n + 1, n);
    SocConstraint epi;
    epi.a = MatrixXd::Zero(n, n + 1);
    epi.a.leftCols(n) = MatrixXd::Identity(n, n);
    epi.b = VectorXd::Zero(n);
    epi.c = VectorXd::Unit(n + 1, n);
    p.cones.push_back(epi);
    p.cones.push_back(linear(VectorXd::Unit(n + 1, 0), -2.0));
    p.nonnegative.assign(n + 1, true);
    const SocSolution s = solve_socp(p);
    REQUIRE(s.status == SocStatus::optimal);
    CHECK(std::abs(s.objective - 2.0) <= 1e-8);
    CHECK(std::abs(s.x(0) - 2.0) <= 1e-8);
    // the optimum sits on a degenerate boundary, so x converges like sqrt(gap)
    CHECK(s.x.segment(1, n - 1).norm() <= 1e-4);
}

TEST_CASE("random instances against a barrier oracle")
{
    Engine rng = make_stream(2024, Stage::symbols, 0);
    for (int rep = 0; rep < 100; ++rep) {
        const testing::RandomSocp inst = testing::random_socp(rng);
        const SocSolution s = solve_socp(inst.problem);
        REQUIRE(s.status == SocStatus::optimal);
        CHECK(s.kkt.primal <= 1e-8);
        CHECK(s.kkt.dual <= 1e-8);
        CHECK(s.kkt.gap <= 1e-8);
        CHECK(max_violation(inst.problem, s.x) <= 1e-9 * (1.0 + s.x.norm()));
        const double oracle = testing::barrier_oracle(inst.problem, inst.interior);
        CHECK(std::abs(s.objective - oracle) <= 1e-4 * std::max(1.0, std::abs(oracle)));
        CHECK(std::abs(s.objective - inst.problem.objective.dot(s.x)) <= 1e-12 * (1.0 + std::abs(s.objective)));
    }
}

TEST_CASE("solves are deterministic")
{
    Engine rng = make_stream(5, Stage::symbols, 0);
    for (int rep = 0; rep < 10; ++rep) {
        const SocProblem p = testing::random_socp(rng).problem;
        const SocSolution a = solve_socp(p);
        const SocSolution b = solve_socp(p);
        CHECK(a.iterations == b.iterations);
        CHECK(a.x == b.x);
        CHECK(a.objective == b.objective);
    }
}

TEST_CASE("text format round trip")
{
    Engine rng = make_stream(6, Stage::symbols, 0);
    for (int rep = 0; rep < 10; ++rep) {
        const SocProblem p = testing::random_socp(rng).problem;
        std::stringstream ss;
        write_problem(ss, p);
        const SocProblem q = read_problem(ss);
        REQUIRE(q.dimension() == p.dimension());
        CHECK(q.objective == p.objective);
        CHECK(q.nonnegative == p.nonnegative);
        REQUIRE(q.cones.size() == p.cones.size());
        for (std::size_t i = 0; i < p.cones.size(); ++i) {
            CHECK(q.cones[i].a == p.cones[i].a);
            CHECK(q.cones[i].b == p.cones[i].b);
            CHECK(q.cones[i].c == p.cones[i].c);
            CHECK(q.cones[i].d == p.cones[i].d);
        }
        CHECK(solve_socp(q).x == solve_socp(p).x);
    }
    std::istringstream bad("socp 1\nn 2\nobjective 1\nend\n");
    CHECK_THROWS(read_problem(bad));
    std::istringstream header("lp 1\n");
    CHECK_THROWS(read_problem(header));
}

TEST_CASE("infeasible and unbounded problems")
{
    SocProblem p = ball_lp(VectorXd::Ones(2), VectorXd::Zero(2), 1.0);
    p.cones.push_back(linear(VectorXd::Unit(2, 0), -3.0));
    CHECK(solve_socp(p).status == SocStatus::infeasible);

    SocProblem u;
    u.objective = -VectorXd::Ones(2);
    u.nonnegative.assign(2, true);
    u.cones.push_back(linear(VectorXd::Unit(2, 1), 1.0));
    CHECK(solve_socp(u).status == SocStatus::unbounded);
}

TEST_CASE("dimension checks")
{
    SocProblem p = ball_lp(VectorXd::Ones(3), VectorXd::Zero(3), 1.0);
    p.cones[0].b = VectorXd::Zero(2);
    CHECK_THROWS_AS(solve_socp(p), std::invalid_argument);
    p = ball_lp(VectorXd::Ones(3), VectorXd::Zero(3), 1.0);
    p.cones[0].c = VectorXd::Zero(4);
    CHECK_THROWS_AS(solve_socp(p), std::invalid_argument);
    p = ball_lp(VectorXd::Ones(3), VectorXd::Zero(3), 1.0);
    p.nonnegative.assign(2, true);
    CHECK_THROWS_AS(solve_socp(p), std::invalid_argument);
    CHECK_THROWS_AS(solve_socp(SocProblem{}), std::invalid_argument);
}
