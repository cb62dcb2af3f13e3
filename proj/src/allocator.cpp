// SPDX-License-Identifier: Apache-2.0
#include "isac/allocator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "isac/errors.hpp"

namespace isac {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<int> active_streams(int n_streams, AllocationMode mode)
{
    std::vector<int> s;
    for (int j = has_sensing_stream(mode) ? 0 : 1; j < n_streams; ++j) {
        s.push_back(j);
    }
    return s;
}

MatrixXd real_block(const MatrixXcd& m, const std::vector<int>& idx)
{
    const int n = static_cast<int>(idx.size());
    MatrixXd out(n, n);
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) {
            out(r, c) = m(idx[r], idx[c]).real();
        }
    }
    return 0.5 * (out + out.transpose());
}

bool objective_converged(double prev, double cur, double tol)
{
    return std::abs(cur - prev) <= tol * std::max(std::abs(prev), std::numeric_limits<double>::min());
}

}  // namespace

const char* to_string(AllocationMode mode)
{
    switch (mode) {
        case AllocationMode::seurllc_plus:
            return "SeURLLC+";
        case AllocationMode::seurllc:
            return "SeURLLC";
        case AllocationMode::urllc_only:
            return "URLLC_only";
    }
    return "unknown";
}

AllocationMode parse_mode(const std::string& name)
{
    for (AllocationMode m : kAllModes) {
        if (name == to_string(m)) {
            return m;
        }
    }
    if (name == "seurllc_plus") {
        return AllocationMode::seurllc_plus;
    }
    if (name == "seurllc") {
        return AllocationMode::seurllc;
    }
    if (name == "urllc_only") {
        return AllocationMode::urllc_only;
    }
    throw ConfigError("unknown mode '" + name + "' (expected SeURLLC+, SeURLLC or URLLC_only)");
}

bool has_sensing_stream(AllocationMode mode) { return mode == AllocationMode::seurllc_plus; }
bool has_sensing_constraint(AllocationMode mode) { return mode != AllocationMode::urllc_only; }

const char* to_string(AllocationStatus status)
{
    switch (status) {
        case AllocationStatus::feasible:
            return "feasible";
        case AllocationStatus::infeasible:
            return "infeasible";
        case AllocationStatus::max_iter:
            return "max_iter";
    }
    return "unknown";
}

AllocationTargets allocation_targets(const SystemConfig& config, const UrllcTargets& urllc)
{
    AllocationTargets t;
    t.gamma_c.resize(urllc.n_ues());
    for (int i = 0; i < urllc.n_ues(); ++i) {
        t.gamma_c(i) = sinr_threshold(urllc.dep_threshold[i], urllc.blocklength, urllc.pilot_len,
                                      urllc.packet_bits[i]);
    }
    t.gamma_s = config.sensing_sinr_threshold;
    t.max_ap_power = config.max_ap_power;
    t.urllc = urllc;
    return t;
}

Subproblem build_subproblem(const CommStatistics& stats, const SensingQuadratics& quad,
                            const AllocationTargets& targets, const VectorXd& rho_prev, bool chi_active,
                            AllocationMode mode, double penalty)
{
    const int n_streams = stats.n_streams();
    if (rho_prev.size() != n_streams || targets.gamma_c.size() != stats.n_ues()) {
        throw std::invalid_argument("build_subproblem: dimension mismatch");
    }
    const bool sensing = has_sensing_constraint(mode);
    const bool with_chi = sensing && chi_active;

    Subproblem sp;
    sp.layout.streams = active_streams(n_streams, mode);
    const int p = static_cast<int>(sp.layout.streams.size());
    sp.layout.t = p;
    sp.layout.chi = with_chi ? p + 1 : -1;
    const int n = p + 1 + (with_chi ? 1 : 0);
    std::vector<int> var_of(static_cast<std::size_t>(n_streams), -1);
    for (int v = 0; v < p; ++v) {
        var_of[static_cast<std::size_t>(sp.layout.streams[v])] = v;
    }

    SocProblem& prob = sp.problem;
    prob.objective = VectorXd::Zero(n);
    prob.objective(sp.layout.t) = 1.0;
    if (with_chi) {
        prob.objective(sp.layout.chi) = penalty;
    }
    prob.nonnegative.assign(static_cast<std::size_t>(n), false);
    for (int v = 0; v < p; ++v) {
        prob.nonnegative[static_cast<std::size_t>(v)] = true;
    }
    if (with_chi) {
        prob.nonnegative[static_cast<std::size_t>(sp.layout.chi)] = true;
    }

    // ||rho|| <= t
    {
        SocConstraint c;
        c.a = MatrixXd::Zero(p, n);
        c.a.leftCols(p).setIdentity();
        c.b = VectorXd::Zero(p);
        c.c = VectorXd::Zero(n);
        c.c(sp.layout.t) = 1.0;
        prob.cones.push_back(std::move(c));
    }

    // ||[a_ij rho_j; sigma]|| <= rho_i b_i / sqrt(gamma_i), divided through by b_i / sqrt(gamma_i)
    const double sigma = std::sqrt(stats.noise_power);
    for (int i = 0; i < stats.n_ues(); ++i) {
        const double gamma = targets.gamma_c(i);
        if (!(gamma > 0.0) || !std::isfinite(gamma) || (stats.b(i) > 0.0 && !(stats.b(i) / std::sqrt(gamma) > 0.0))) {
            throw ConfigError("SINR threshold of UE " + std::to_string(i) + " is not representable");
        }
        // A UE without coherent gain keeps the unscaled, infeasible cone.
        const double scale = stats.b(i) > 0.0 ? std::sqrt(gamma) / stats.b(i) : 1.0;
        const double own = stats.b(i) > 0.0 ? 1.0 : 0.0;
        SocConstraint c;
        c.a = MatrixXd::Zero(p + 1, n);
        for (int v = 0; v < p; ++v) {
            c.a(v, v) = stats.a(i, sp.layout.streams[v]) * scale;
        }
        c.b = VectorXd::Zero(p + 1);
        c.b(p) = sigma * scale;
        c.c = VectorXd::Zero(n);
        c.c(var_of[static_cast<std::size_t>(i + 1)]) = own;
        prob.cones.push_back(std::move(c));
    }

    // ||F_k rho|| <= sqrt(P_tx)
    const double budget = std::sqrt(targets.max_ap_power);
    for (int k = 0; k < stats.n_aps(); ++k) {
        SocConstraint c;
        c.a = MatrixXd::Zero(p, n);
        for (int v = 0; v < p; ++v) {
            c.a(v, v) = stats.F(k, sp.layout.streams[v]) / budget;
        }
        c.b = VectorXd::Zero(p);
        c.c = VectorXd::Zero(n);
        c.d = 1.0;
        prob.cones.push_back(std::move(c));
    }

    if (sensing) {
        // gamma rho^T B rho - 2 (A rho_c)^T rho + rho_c^T A rho_c + gamma <= chi, normalized by the noise floor,
        // as ||[2 P rho; 1 - v]|| <= 1 + v with P^T P = gamma B and v = 2 (A rho_c)^T rho - rho_c^T A rho_c - gamma + chi.
        const double nf = quad.noise_floor;
        if (!(nf > 0.0)) {
            throw std::invalid_argument("build_subproblem: sensing noise floor must be positive");
        }
        const MatrixXd a = real_block(quad.A, sp.layout.streams) / nf;
        const MatrixXd b = real_block(quad.B, sp.layout.streams) / nf;
        VectorXd rc(p);
        for (int v = 0; v < p; ++v) {
            rc(v) = rho_prev(sp.layout.streams[v]);
        }
        const double gamma = targets.gamma_s;
        const double curvature = rc.dot(a * rc);
        // Dividing x^2 <= v by s keeps the rotated-cone form and brings v to O(1).
        const double s = std::max(1e-12, gamma + curvature);
        const MatrixXd root = std::sqrt(gamma / s) * symmetric_sqrt(b);
        const VectorXd grad = 2.0 * a * rc / s;
        const double v0 = (-curvature - gamma) / s;

        SocConstraint c;
        c.a = MatrixXd::Zero(p + 1, n);
        c.a.topLeftCorner(p, p) = 2.0 * root;
        c.a.row(p).head(p) = -grad.transpose();
        c.b = VectorXd::Zero(p + 1);
        c.b(p) = 1.0 - v0;
        c.c = VectorXd::Zero(n);
        c.c.head(p) = grad;
        c.d = 1.0 + v0;
        if (with_chi) {
            c.a(p, sp.layout.chi) = -1.0 / s;
            c.c(sp.layout.chi) = 1.0 / s;
        }
        prob.cones.push_back(std::move(c));
    }
    return sp;
}

VectorXd initial_rho(const CommStatistics& stats, double max_ap_power, AllocationMode mode, double fraction)
{
    const std::vector<int> streams = active_streams(stats.n_streams(), mode);
    double level = kInf;
    for (int k = 0; k < stats.n_aps(); ++k) {
        double load = 0.0;
        for (int j : streams) {
            load += stats.F(k, j) * stats.F(k, j);
        }
        if (load > 0.0) {
            level = std::min(level, std::sqrt(fraction * max_ap_power / load));
        }
    }
    if (!std::isfinite(level)) {
        level = std::sqrt(fraction * max_ap_power);
    }
    VectorXd rho = VectorXd::Zero(stats.n_streams());
    for (int j : streams) {
        rho(j) = level;
    }
    return rho;
}

bool ConstraintReport::comm_ok(double tol) const
{
    return (sinr_margin.size() == 0 || sinr_margin.minCoeff() >= -tol) &&
           (dep_margin.size() == 0 || dep_margin.minCoeff() >= -tol);
}

bool ConstraintReport::sensing_ok(double tol) const { return sensing_margin >= -tol; }

bool ConstraintReport::power_ok(double tol) const { return ap_margin.size() == 0 || ap_margin.minCoeff() >= -tol; }

ConstraintReport verify_allocation(const VectorXd& rho, const CommStatistics& stats, const SensingQuadratics& quad,
                                   const AllocationTargets& targets, AllocationMode mode)
{
    const int n_ues = stats.n_ues();
    ConstraintReport r;
    r.sinr.resize(n_ues);
    r.sinr_margin.resize(n_ues);
    r.dep.resize(n_ues);
    r.dep_margin.resize(n_ues);
    for (int i = 0; i < n_ues; ++i) {
        r.sinr(i) = comm_sinr(rho, stats, i);
        r.sinr_margin(i) = r.sinr(i) / targets.gamma_c(i) - 1.0;
        const double eps = targets.urllc.dep_threshold[static_cast<std::size_t>(i)];
        r.dep(i) = dep_upper_bound(r.sinr(i), targets.urllc.blocklength, targets.urllc.pilot_len,
                                   targets.urllc.packet_bits[static_cast<std::size_t>(i)]);
        r.dep_margin(i) = 1.0 - r.dep(i) / eps;
    }

    r.sensing_sinr = sensing_sinr(rho, quad);
    r.sensing_margin = kInf;
    if (has_sensing_constraint(mode)) {
        r.sensing_margin = targets.gamma_s > 0.0 ? r.sensing_sinr / targets.gamma_s - 1.0 : kInf;
        if (has_sensing_stream(mode) == false && rho.size() > 0 && rho(0) != 0.0) {
            r.sensing_margin = -kInf;
        }
    }

    r.ap_power.resize(stats.n_aps());
    r.ap_margin.resize(stats.n_aps());
    for (int k = 0; k < stats.n_aps(); ++k) {
        r.ap_power(k) = stats.F.row(k).transpose().cwiseProduct(rho).squaredNorm();
        r.ap_margin(k) = 1.0 - r.ap_power(k) / targets.max_ap_power;
    }
    return r;
}

namespace {

PowerAllocation run_sca(const CommStatistics& stats, const SensingQuadratics& quad, const AllocationTargets& targets,
                        AllocationMode mode, const ScaParams& sca, const SocSettings& solver, VectorXd rho)
{
    PowerAllocation out;
    bool chi_active = has_sensing_constraint(mode);
    double chi = 0.0;
    double best_slack_free = kInf;
    bool solved = false;

    for (int c = 0; c < sca.max_iterations; ++c) {
        const Subproblem sp = build_subproblem(stats, quad, targets, rho, chi_active, mode, sca.penalty);
        const SocSolution sol = solve_socp(sp.problem, solver);
        out.iterations = c + 1;
        out.solver_iterations += sol.iterations;
        if (sol.status != SocStatus::optimal) {
            if (sol.status == SocStatus::infeasible && c == 0) {
                out.status = AllocationStatus::infeasible;
                out.diagnostic = "communication and power constraints are jointly infeasible";
            } else {
                out.status = AllocationStatus::max_iter;
                out.diagnostic = std::string("stopped early, subproblem ") + std::to_string(c) + ": " + to_string(sol.status);
            }
            out.rho = rho;
            out.chi = chi;
            break;
        }
        solved = true;

        VectorXd next = VectorXd::Zero(stats.n_streams());
        for (std::size_t v = 0; v < sp.layout.streams.size(); ++v) {
            next(sp.layout.streams[v]) = std::max(0.0, sol.x(static_cast<int>(v)));
        }
        chi = sp.layout.chi >= 0 ? std::max(0.0, sol.x(sp.layout.chi)) : 0.0;
        const double f = sol.objective;
        out.objective_trace.push_back(f);
        if (sp.layout.chi < 0) {
            if (f > best_slack_free * (1.0 + 1e-6) + 1e-12) {
                out.monotone = false;
            }
            best_slack_free = std::min(best_slack_free, f);
        }
        rho = next;
        const bool chi_was_active = sp.layout.chi >= 0;
        if (chi_active && chi < sca.slack_tol) {
            chi_active = false;
            chi = 0.0;
        }
        const std::size_t len = out.objective_trace.size();
        if (len >= 2 && objective_converged(out.objective_trace[len - 2], f, sca.objective_tol) &&
            !(chi_was_active && !chi_active)) {
            break;
        }
    }

    if (!solved) {
        out.total_power = 0.0;
        return out;
    }
    out.rho = rho;
    out.chi = chi;
    out.report = verify_allocation(rho, stats, quad, targets, mode);
    out.total_power = rho.squaredNorm();
    out.ap_power = out.report.ap_power;
    if (out.report.ok()) {
        out.status = AllocationStatus::feasible;
        out.chi = 0.0;
    } else if (chi > sca.slack_tol) {
        out.status = AllocationStatus::infeasible;
        out.diagnostic = "sensing slack did not vanish";
    } else {
        out.status = AllocationStatus::max_iter;
        out.diagnostic = "final point failed verification";
    }
    return out;
}

}  // namespace

PowerAllocation fpp_sca(const CommStatistics& stats, const SensingQuadratics& quad, const AllocationTargets& targets,
                        AllocationMode mode, const ScaParams& sca, const AllocatorOptions& options)
{
    static constexpr double kFractions[] = {0.5, 0.95, 0.1, 0.25, 0.75, 0.02};
    const int starts = std::clamp(options.multi_start, 1, static_cast<int>(std::size(kFractions)));
    PowerAllocation best;
    bool have = false;
    for (int s = 0; s < starts; ++s) {
        const VectorXd rho0 = initial_rho(stats, targets.max_ap_power, mode, kFractions[s]);
        PowerAllocation run = run_sca(stats, quad, targets, mode, sca, options.solver, rho0);
        if (!have || (run.status == AllocationStatus::feasible &&
                      (best.status != AllocationStatus::feasible || run.total_power < best.total_power))) {
            best = std::move(run);
            have = true;
        }
        if (best.status == AllocationStatus::feasible ||
            (best.status == AllocationStatus::infeasible && !has_sensing_constraint(mode))) {
            break;
        }
    }
    return best;
}

}  // namespace isac
