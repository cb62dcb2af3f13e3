// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "isac/linalg.hpp"
#include "isac/scenario.hpp"
#include "isac/socp.hpp"
#include "isac/stats.hpp"
#include "isac/urllc.hpp"

namespace isac {

/// seurllc_plus: sensing stream and sensing constraint.
/// seurllc: no sensing stream, sensing constraint kept.
/// urllc_only: no sensing stream, no sensing constraint.
enum class AllocationMode { seurllc_plus, seurllc, urllc_only };

inline constexpr AllocationMode kAllModes[] = {AllocationMode::seurllc_plus, AllocationMode::seurllc,
                                               AllocationMode::urllc_only};

const char* to_string(AllocationMode mode);
/// Accepts the names printed by to_string. Throws ConfigError otherwise.
AllocationMode parse_mode(const std::string& name);

bool has_sensing_stream(AllocationMode mode);
bool has_sensing_constraint(AllocationMode mode);

struct AllocationTargets {
    VectorXd gamma_c;      // per-UE SINR thresholds
    double gamma_s = 0.0;  // sensing SINR threshold
    double max_ap_power = 0.0;
    UrllcTargets urllc;
};

AllocationTargets allocation_targets(const SystemConfig& config, const UrllcTargets& urllc);

/// Variable layout of one convex subproblem.
struct SubproblemLayout {
    std::vector<int> streams;  // stream index of each power variable
    int t = -1;                // epigraph variable of the norm objective
    int chi = -1;              // sensing slack, -1 when absent
};

struct Subproblem {
    SocProblem problem;
    SubproblemLayout layout;
};

/// Convex restriction around rho_prev (stream-indexed, length N_ue+1).
Subproblem build_subproblem(const CommStatistics& stats, const SensingQuadratics& quad,
                            const AllocationTargets& targets, const VectorXd& rho_prev, bool chi_active,
                            AllocationMode mode, double penalty);

/// Equal square-root power on every active stream at `fraction` of the
/// tightest per-AP budget.
VectorXd initial_rho(const CommStatistics& stats, double max_ap_power, AllocationMode mode,
                     double fraction = 0.5);

struct ConstraintReport {
    VectorXd sinr;            // achieved comm SINR per UE
    VectorXd sinr_margin;     // sinr / gamma_c - 1
    VectorXd dep;             // DEP upper bound per UE
    VectorXd dep_margin;      // 1 - dep / dep_threshold
    double sensing_sinr = 0.0;
    double sensing_margin = 0.0;  // sensing_sinr / gamma_s - 1, +inf when not required
    VectorXd ap_power;
    VectorXd ap_margin;       // 1 - P_k / P_tx

    bool comm_ok(double tol = 1e-6) const;
    bool sensing_ok(double tol = 1e-6) const;
    bool power_ok(double tol = 1e-6) const;
    bool ok(double tol = 1e-6) const { return comm_ok(tol) && sensing_ok(tol) && power_ok(tol); }
};

ConstraintReport verify_allocation(const VectorXd& rho, const CommStatistics& stats, const SensingQuadratics& quad,
                                   const AllocationTargets& targets, AllocationMode mode);

enum class AllocationStatus { feasible, infeasible, max_iter };

const char* to_string(AllocationStatus status);

struct PowerAllocation {
    AllocationStatus status = AllocationStatus::max_iter;
    VectorXd rho;   // stream-indexed square-root powers
    double chi = 0.0;
    std::vector<double> objective_trace;
    int iterations = 0;
    int solver_iterations = 0;
    double total_power = 0.0;
    VectorXd ap_power;
    /// Objective non-increasing after the first slack-free iteration.
    bool monotone = true;
    std::string diagnostic;
    ConstraintReport report;
};

struct AllocatorOptions {
    /// Extra initial points tried after an unsuccessful first run.
    int multi_start = 1;
    SocSettings solver{};
};

PowerAllocation fpp_sca(const CommStatistics& stats, const SensingQuadratics& quad, const AllocationTargets& targets,
                        AllocationMode mode, const ScaParams& sca, const AllocatorOptions& options = {});

}  // namespace isac
