// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "isac/linalg.hpp"

namespace isac {

/// ||a x + b|| <= c^T x + d. An empty `a` encodes the linear inequality
/// 0 <= c^T x + d.
struct SocConstraint {
    MatrixXd a;
    VectorXd b;
    VectorXd c;
    double d = 0.0;
};

/// minimize objective^T x subject to the cone constraints and x_j >= 0 for
/// every j flagged in `nonnegative` (empty means no sign constraints).
struct SocProblem {
    VectorXd objective;
    std::vector<SocConstraint> cones;
    std::vector<bool> nonnegative;

    int dimension() const { return static_cast<int>(objective.size()); }
    /// Throws std::invalid_argument on inconsistent dimensions.
    void validate() const;
};

enum class SocStatus { optimal, infeasible, unbounded, max_iter };

const char* to_string(SocStatus s);

struct KktResiduals {
    double primal = 0.0;
    double dual = 0.0;
    double gap = 0.0;
};

struct SocSolution {
    SocStatus status = SocStatus::max_iter;
    VectorXd x;
    double objective = 0.0;
    KktResiduals kkt;
    int iterations = 0;
};

struct SocSettings {
    double feastol = 1e-10;
    double gaptol = 1e-10;
    /// Accepted when progress stalls before the strict tolerances are met.
    double reduced_tol = 1e-8;
    int max_iterations = 120;
    double step_fraction = 0.99;
};

/// Dense primal-dual interior-point solver on the homogeneous self-dual
/// embedding with Nesterov-Todd scaling and Mehrotra correction.
SocSolution solve_socp(const SocProblem& problem, const SocSettings& settings = {});

/// Largest violation of any constraint at x, in absolute units.
double max_violation(const SocProblem& problem, const VectorXd& x);

/// Plain-text fixture format (see docs/socp_format.md).
void write_problem(std::ostream& out, const SocProblem& problem);
SocProblem read_problem(std::istream& in);

}  // namespace isac
