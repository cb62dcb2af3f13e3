// SPDX-License-Identifier: Apache-2.0
#include "isac/socp.hpp"

#include "isac/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Cholesky>

namespace isac {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Standard form: minimize c^T x s.t. G x + s = h, s in K where
// K = R^l_+ x Q^{q_1} x ... x Q^{q_k}. Orthant rows come first.
struct ConicForm {
    MatrixXd G;
    VectorXd h;
    VectorXd c;
    int l = 0;
    std::vector<int> soc_offset;
    std::vector<int> soc_dim;

    int rows() const { return static_cast<int>(h.size()); }
    int degree() const { return l + static_cast<int>(soc_dim.size()); }
};

ConicForm to_conic(const SocProblem& p)
{
    const int n = p.dimension();
    int l = 0;
    int soc_rows = 0;
    for (std::size_t j = 0; j < p.nonnegative.size(); ++j) {
        if (p.nonnegative[j]) {
            ++l;
        }
    }
    for (const auto& cone : p.cones)
   {
        if (cone.a.rows() == 0) {
            ++l;
        } else {
            soc_rows += 1 + static_cast<int>(cone.a.rows());
        }
    }
    ConicForm f;
    f.c = p.objective;
    f.l = l;
    f.G = MatrixXd::Zero(l + soc_rows, n);
    f.h = VectorXd::Zero(l + soc_rows);
    int row = 0;
    for (std::size_t j = 0; j < p.nonnegative.size(); ++j) {
        if (p.nonnegative[j]) {
            f.G(row, static_cast<int>(j)) = -1.0;
            ++row;
        }
    }
    for (const auto& cone : p.cones)
   {
        if (cone.a.rows() == 0) {
            f.G.row(row) = -cone.c.transpose();
            f.h(row) = cone.d;
            ++row;
        }
    }
    for (const auto& cone : p.cones)
   {
        if (cone.a.rows() == 0) {
            continue;
        }
        const int q = static_cast<int>(cone.a.rows());
        f.soc_offset.push_back(row);
        f.soc_dim.push_back(q + 1);
        f.G.row(row) = -cone.c.transpose();
        f.h(row) = cone.d;
        f.G.block(row + 1, 0, q, n) = -cone.a;
        f.h.segment(row + 1, q) = cone.b;
        row += q + 1;
    }
    return f;
}

// sqrt(u0^2 - |u1|^2) computed as a product to limit cancellation.
double soc_residual(double u0, double norm1)
{
    const double prod = (u0 - norm1) * (u0 + norm1);
    return prod > 0.0 ? std::sqrt(prod) : 0.0;
}

double min_cone_eigenvalue(const ConicForm& f, const VectorXd& u)
{
    double m = kInf;
    for (int i = 0; i < f.l; ++i) {
        m = std::min(m, u(i));
    }
    for (std::size_t k = 0; k < f.soc_dim.size(); ++k) {
        const int o = f.soc_offset[k];
        const int q = f.soc_dim[k];
        m = std::min(m, u(o) - u.segment(o + 1, q - 1).norm());
    }
    return m;
}

void add_identity(const ConicForm& f, VectorXd& u, double alpha)
{
    u.head(f.l).array() += alpha;
    for (int o : f.soc_offset)
   {
        u(o) += alpha;
    }
}

VectorXd jordan_product(const ConicForm& f, const VectorXd& u, const VectorXd& v)
{
    VectorXd w(u.size());
    w.head(f.l) = u.head(f.l).cwiseProduct(v.head(f.l));
    for (std::size_t k = 0; k < f.soc_dim.size(); ++k) {
        const int o = f.soc_offset[k];
        const int q = f.soc_dim[k] - 1;
        w(o) = u.segment(o, q + 1).dot(v.segment(o, q + 1));
        w.segment(o + 1, q) = u(o) * v.segment(o + 1, q) + v(o) * u.segment(o + 1, q);
    }
    return w;
}

// Solves lambda o x = v for x.
VectorXd jordan_divide(const ConicForm& f, const VectorXd& lambda, const VectorXd& v)
{
    VectorXd x(v.size());
    x.head(f.l) = v.head(f.l).cwiseQuotient(lambda.head(f.l));
    for (std::size_t k = 0; k < f.soc_dim.size(); ++k) {
        const int o = f.soc_offset[k];
        const int q = f.soc_dim[k] - 1;
        const double l0 = lambda(o);
        const auto l1 = lambda.segment(o + 1, q);
        const double det = (l0 - l1.norm()) * (l0 + l1.norm());
        const double u0 = (l0 * v(o) - l1.dot(v.segment(o + 1, q))) / det;
        x(o) = u0;
        x.segment(o + 1, q) = (v.segment(o + 1, q) - u0 * l1) / l0;
    }
    return x;
}

double orthant_step(double u, double du) { return du < 0.0 ? -u / du : kInf; }

double soc_step(const VectorXd& u, const VectorXd& du)
{
    const int q = static_cast<int>(u.size()) - 1;
    const double a = du(0) * du(0) - du.tail(q).squaredNorm();
    const double b = 2.0 * (u(0) * du(0) - u.tail(q).dot(du.tail(q)));
    const double n1 = u.tail(q).norm();
    const double c = (u(0) - n1) * (u(0) + n1);
    if (c <= 0.0) {
        return 0.0;
    }
    const double scale = std::max({std::abs(a), std::abs(b), c});
    if (std::abs(a) <= 1e-15 * scale) {
        return b < 0.0 ? -c / b : kInf;
    }
    const double disc = b * b - 4.0 * a * c;
    if (disc < 0.0)
   {
        return kInf;
    }
    const double sq = std::sqrt(disc);
    const double qq = -0.5 * (b + (b >= 0.0 ? sq : -sq));
    double r1 = qq / a;
    double r2 = qq != 0.0 ? c / qq : kInf;
    double best = kInf;
    for (double r : {r1, r2})
   {
        if (r > 0.0 && r < best)
       {
            best = r;
        }
    }
    return best;
}

double max_step(const ConicForm& f, const VectorXd& u, const VectorXd& du)
{
    double alpha = kInf;
    for (int i = 0; i < f.l; ++i) {
        alpha = std::min(alpha, orthant_step(u(i), du(i)));
    }
    for (std::size_t k = 0; k < f.soc_dim.size(); ++k) {
        const int o = f.soc_offset[k];
        const int q = f.soc_dim[k];
        alpha = std::min(alpha, soc_step(u.segment(o, q), du.segment(o, q)));
    }
    return alpha;
}

// Nesterov-Todd scaling W with W z = W^{-1} s = lambda.
struct Scaling {
    VectorXd d;                 // orthant part
    std::vector<double> eta;    // per cone
    std::vector<VectorXd> wbar; // per cone, unit hyperbolic norm

    VectorXd apply(const ConicForm& f, const VectorXd& u, bool inverse) const
    {
        VectorXd out(u.size());
        if (inverse)
       {
            out.head(f.l) = u.head(f.l).cwiseQuotient(d);
        } else {
            out.head(f.l) = u.head(f.l).cwiseProduct(d);
        }
        for (std::size_t k = 0; k < wbar.size(); ++k) {
            const int o = f.soc_offset[k];
            const int q = f.soc_dim[k] - 1;
            const double w0 = wbar[k](0);
            const auto w1 = wbar[k].tail(q);
            const double u0 = u(o);
            const auto u1 = u.segment(o + 1, q);
            const double dot = w1.dot(u1);
            const double sign = inverse ? -1.0 : 1.0;
            const double scale = inverse ? 1.0 / eta[k] : eta[k];
            out(o) = scale * (w0 * u0 + sign * dot);
            out.segment(o + 1, q) = scale * (sign * u0 * w1 + u1 + (dot / (1.0 + w0)) * w1);
        }
        return out;
    }

    // (W^T W)^{-1} applied to the columns of M.
    MatrixXd phi(const ConicForm& f, const MatrixXd& m) const
    {
        MatrixXd out(m.rows(), m.cols());
        for (int i = 0; i < f.l; ++i) {
            out.row(i) = m.row(i) / (d(i) * d(i));
        }
        for (std::size_t k = 0; k < wbar.size(); ++k) {
            const int o = f.soc_offset[k];
            const int q = f.soc_dim[k];
            VectorXd jw = wbar[k];
            jw.tail(q - 1) *= -1.0;
            MatrixXd block = m.middleRows(o, q);
            const Eigen::RowVectorXd proj = jw.transpose() * block;
            MatrixXd jb = block;
            jb.bottomRows(q - 1) *= -1.0;
            out.middleRows(o, q) = (2.0 * jw * proj - jb) / (eta[k] * eta[k]);
        }
        return out;
    }
};

Scaling nt_scaling(const ConicForm& f, const VectorXd& s, const VectorXd& z)
{
    Scaling w;
    w.d = (s.head(f.l).array() / z.head(f.l).array()).sqrt();
    for (std::size_t k = 0; k < f.soc_dim.size(); ++k) {
        const int o = f.soc_offset[k];
        const int q = f.soc_dim[k] - 1;
        const double sr = soc_residual(s(o), s.segment(o + 1, q).norm());
        const double zr = soc_residual(z(o), z.segment(o + 1, q).norm());
        if (!(sr > 0.0) || !(zr > 0.0))
       {
            throw NumericalError("iterate left the cone interior");
        }
        VectorXd sb = s.segment(o, q + 1) / sr;
        VectorXd zb = z.segment(o, q + 1) / zr;
        const double gamma = std::sqrt(0.5 * (1.0 + sb.dot(zb)));
        VectorXd wb(q + 1);
        wb(0) = (sb(0) + zb(0)) / (2.0 * gamma);
        wb.tail(q) = (sb.tail(q) - zb.tail(q)) / (2.0 * gamma);
        // Re-normalize so that wb0^2 - |wb1|^2 = 1 exactly.
        wb(0) = std::sqrt(1.0 + wb.tail(q).squaredNorm());
        w.eta.push_back(std::sqrt(sr / zr));
        w.wbar.push_back(std::move(wb));
    }
    return w;
}

// Reduced KKT solver for [0 G^T; G -W^T W] [x; z] = [r1; r2].
class KktSolver {
public:
    KktSolver(const ConicForm& f, const Scaling& w) : f_(f), w_(w)
    {
        phi_g_ = w.phi(f, f.G);
        MatrixXd h = f.G.transpose() * phi_g_;
        const double reg = 1e-13 * std::max(1.0, h.diagonal().maxCoeff());
        h.diagonal().array() += reg;
        llt_.compute(h);
        if (llt_.info() != Eigen::Success) {
            throw NumericalError("normal equations are not positive definite");
        }
    }

    void solve(const VectorXd& r1, const VectorXd& r2, VectorXd& x, VectorXd& z) const
    {
        base_solve(r1, r2, x, z);
        for (int it = 0; it < 3; ++it) {
            const VectorXd e1 = r1 - f_.G.transpose() * z;
            const VectorXd e2 = r2 - (f_.G * x - w_.apply(f_, w_.apply(f_, z, false), false));
            const double err = std::max(e1.lpNorm<Eigen::Infinity>(), e2.lpNorm<Eigen::Infinity>());
            const double ref = 1.0 + std::max(r1.lpNorm<Eigen::Infinity>(), r2.lpNorm<Eigen::Infinity>());
            if (err <= 1e-14 * ref) {
                break;
            }
            VectorXd dx;
            VectorXd dz;
            base_solve(e1, e2, dx, dz);
            x += dx;
            z += dz;
        }
    }

private:
    void base_solve(const VectorXd& r1, const VectorXd& r2, VectorXd& x, VectorXd& z) const
    {
        const VectorXd phi_r2 = w_.phi(f_, r2);
        x = llt_.solve(r1 + f_.G.transpose() * phi_r2);
        z = phi_g_ * x - phi_r2;
    }

    const ConicForm& f_;
    const Scaling& w_;
    MatrixXd phi_g_;
    Eigen::LLT<MatrixXd> llt_;
};

struct Iterate {
    VectorXd x;
    VectorXd s;
    VectorXd z;
    double tau = 1.0;
    double kappa = 1.0;
};

struct Direction {
    VectorXd dx;
    VectorXd ds;
    VectorXd dz;
    double dtau = 0.0;
    double dkappa = 0.0;
};

Iterate initial_point(const ConicForm& f)
{
    const int n = static_cast<int>(f.G.cols());
    MatrixXd gtg = f.G.transpose() * f.G;
    gtg.diagonal().array() += 1e-12 * std::max(1.0, gtg.diagonal().maxCoeff());
    Eigen::LLT<MatrixXd> llt(gtg);
    if (llt.info() != Eigen::Success) {
        throw NumericalError("constraint matrix is rank deficient");
    }
    Iterate it;
    it.x = llt.solve(f.G.transpose() * f.h);
    it.s = f.h - f.G * it.x;
    it.z = -f.G * llt.solve(f.c);
    if (n == 0) {
        it.z = VectorXd::Zero(f.rows());
    }
    for (VectorXd* u : {&it.s, &it.z})
   {
        const double m = min_cone_eigenvalue(f, *u);
        if (m <= 0.0) {
            add_identity(f, *u, 1.0 - m);
        }
    }
    return it;
}

struct Metrics {
    double pres;
    double dres;
    double gap;
    double pcost;
    double dcost;
    double pinf;
    double dinf;
    double hz;
    double cx;
};

Metrics metrics(const ConicForm& f, const Iterate& it)
{
    const VectorXd rx = f.G.transpose() * it.z + f.c * it.tau;
    const VectorXd rz = f.G * it.x + it.s - f.h * it.tau;
    Metrics m{};
    m.pres = rz.norm() / it.tau / std::max(1.0, f.h.norm());
    m.dres = rx.norm() / it.tau / std::max(1.0, f.c.norm());
    m.pcost = f.c.dot(it.x) / it.tau;
    m.dcost = -f.h.dot(it.z) / it.tau;
    m.gap = it.s.dot(it.z) / (it.tau * it.tau) / std::max(1.0, std::abs(m.pcost));
    m.hz = f.h.dot(it.z);
    m.cx = f.c.dot(it.x);
    m.pinf = m.hz < 0.0 ? (f.G.transpose() * it.z).norm() / -m.hz : kInf;
    m.dinf = m.cx < 0.0 ? (f.G * it.x + it.s).norm() / -m.cx : kInf;
    return m;
}

Direction solve_direction(const ConicForm& f, const Iterate& it, const Scaling& w, const KktSolver& kkt,
                          const VectorXd& lambda, const VectorXd& x1, const VectorXd& z1, const VectorXd& rx,
                          const VectorXd& rz, double rtau, double eta, const VectorXd& d_s, double d_kappa) {
    const VectorXd xi = jordan_divide(f, lambda, d_s);
    const VectorXd r1 = -eta * rx;
    const VectorXd r2 = -eta * rz - w.apply(f, xi, false);
    VectorXd x2;
    VectorXd z2;
    kkt.solve(r1, r2, x2, z2);
    Direction d;
    const double denom = f.c.dot(x1) + f.h.dot(z1) - it.kappa / it.tau;
    d.dtau = (-eta * rtau - d_kappa / it.tau - f.c.dot(x2) - f.h.dot(z2)) / denom;
    d.dx = x2 + d.dtau * x1;
    d.dz = z2 + d.dtau * z1;
    // Primal row of the linearized system; equal to W (xi - W dz) in exact
    // arithmetic but immune to the conditioning of W near the boundary.
    d.ds = -eta * rz - f.G * d.dx + f.h * d.dtau;
    d.dkappa = (d_kappa - it.kappa * d.dtau) / it.tau;
    return d;
}

double step_length(const ConicForm& f, const Iterate& it, const Direction& d)
{
    double alpha = std::min(max_step(f, it.s, d.ds), max_step(f, it.z, d.dz));
    alpha = std::min(alpha, orthant_step(it.tau, d.dtau));
    alpha = std::min(alpha, orthant_step(it.kappa, d.dkappa));
    return alpha;
}

SocSolution finish(const ConicForm& f, const Iterate& it, const Metrics& m, SocStatus status, int iterations)
{
    SocSolution sol;
    sol.status = status;
    sol.iterations = iterations;
    sol.kkt = {m.pres, m.dres, m.gap};
    if (status == SocStatus::infeasible) {
        sol.x = VectorXd::Constant(f.c.size(), std::numeric_limits<double>::quiet_NaN());
        sol.objective = kInf;
    } else if (status == SocStatus::unbounded) {
        sol.x = it.x / std::max(std::abs(m.cx), 1e-300);
        sol.objective = -kInf;
    } else {
        sol.x = it.x / it.tau;
        sol.objective = f.c.dot(sol.x);
    }
    return sol;
}

}  // namespace

const char* to_string(SocStatus s)
{
    switch (s)
   {
        case SocStatus::optimal:
            return "optimal";
        case SocStatus::infeasible:
            return "infeasible";
        case SocStatus::unbounded:
            return "unbounded";
        case SocStatus::max_iter:
            return "max_iter";
    }
    return "unknown";
}

void SocProblem::validate() const
{
    const int n = dimension();
    if (n <= 0) {
        throw std::invalid_argument("socp: empty variable vector");
    }
    if (!objective.allFinite())
   {
        throw std::invalid_argument("socp: non-finite objective");
    }
    if (!nonnegative.empty() && static_cast<int>(nonnegative.size()) != n) {
        throw std::invalid_argument("socp: nonnegativity mask has wrong length");
    }
    for (std::size_t k = 0; k < cones.size(); ++k) {
        const auto& cone = cones[k];
        const std::string where = "socp: cone " + std::to_string(k) + ": ";
        if (cone.c.size() != n) {
            throw std::invalid_argument(where + "c has wrong length");
        }
        if (cone.a.rows() > 0 && cone.a.cols() != n) {
            throw std::invalid_argument(where + "A has wrong column count");
        }
        if (cone.b.size() != cone.a.rows()) {
            throw std::invalid_argument(where + "b does not match A");
        }
        if (!cone.a.allFinite() || !cone.b.allFinite() || !cone.c.allFinite() || !std::isfinite(cone.d))
       {
            throw std::invalid_argument(where + "non-finite data");
        }
    }
    bool any_nonneg = false;
    for (bool b : nonnegative)
   {
        any_nonneg = any_nonneg || b;
    }
    if (cones.empty() && !any_nonneg)
   {
        throw std::invalid_argument("socp: no constraints");
    }
}

double max_violation(const SocProblem& p, const VectorXd& x)
{
    double v = 0.0;
    for (std::size_t j = 0; j < p.nonnegative.size(); ++j) {
        if (p.nonnegative[j]) {
            v = std::max(v, -x(static_cast<int>(j)));
        }
    }
    for (const auto& cone : p.cones)
   {
        const double rhs = cone.c.dot(x) + cone.d;
        const double lhs = cone.a.rows() > 0 ? (cone.a * x + cone.b).norm() : 0.0;
        v = std::max(v, lhs - rhs);
    }
    return v;
}

SocSolution solve_socp(const SocProblem& problem, const SocSettings& settings)
{
    problem.validate();
    const ConicForm f = to_conic(problem);
    const double degree = f.degree() + 1.0;

    Iterate it = initial_point(f);
    Metrics m = metrics(f, it);
    Iterate best = it;
    Metrics best_m = m;
    auto merit = [](const Metrics& q) { return std::max({q.pres, q.dres, q.gap}); };

    int iter = 0;
    int stall = 0;
    for (; iter <= settings.max_iterations; ++iter) {
        m = metrics(f, it);
        if (std::isfinite(merit(m)) && merit(m) <= merit(best_m)) {
            best = it;
            best_m = m;
            stall = 0;
        } else if (merit(best_m) <= settings.reduced_tol && ++stall >= 3) {
            break;
        }
        if (m.pres <= settings.feastol && m.dres <= settings.feastol && m.gap <= settings.gaptol) {
            return finish(f, it, m, SocStatus::optimal, iter);
        }
        if (m.pinf <= settings.feastol) {
            return finish(f, it, m, SocStatus::infeasible, iter);
        }
        if (m.dinf <= settings.feastol) {
            return finish(f, it, m, SocStatus::unbounded, iter);
        }
        if (iter == settings.max_iterations) {
            break;
        }

        try {
            const Scaling w = nt_scaling(f, it.s, it.z);
            const VectorXd lambda = w.apply(f, it.z, false);
            const KktSolver kkt(f, w);
            VectorXd x1;
            VectorXd z1;
            kkt.solve(-f.c, f.h, x1, z1);

            const VectorXd rx = f.G.transpose() * it.z + f.c * it.tau;
            const VectorXd rz = f.G * it.x + it.s - f.h * it.tau;
            const double rtau = f.c.dot(it.x) + f.h.dot(it.z) + it.kappa;
            const double mu = (it.s.dot(it.z) + it.tau * it.kappa) / degree;

            const VectorXd ll = jordan_product(f, lambda, lambda);
            const Direction aff = solve_direction(f, it, w, kkt, lambda, x1, z1, rx, rz, rtau, 1.0, -ll,
                                                  -it.kappa * it.tau);
            const double alpha_aff = std::min(1.0, step_length(f, it, aff));
            const double sigma = std::clamp(std::pow(1.0 - alpha_aff, 3), 0.0, 1.0);

            VectorXd d_s = -ll - jordan_product(f, w.apply(f, aff.ds, true), w.apply(f, aff.dz, false));
            add_identity(f, d_s, sigma * mu);
            const double d_kappa = -it.kappa * it.tau - aff.dkappa * aff.dtau + sigma * mu;
            const Direction d = solve_direction(f, it, w, kkt, lambda, x1, z1, rx, rz, rtau, 1.0 - sigma, d_s,
                                                d_kappa);
            const double alpha = std::min(1.0, settings.step_fraction * step_length(f, it, d));
            if (!(alpha > 1e-12) || !d.dx.allFinite())
           {
                break;
            }
            it.x += alpha * d.dx;
            it.s += alpha * d.ds;
            it.z += alpha * d.dz;
            it.tau += alpha * d.dtau;
            it.kappa += alpha * d.dkappa;
            if (min_cone_eigenvalue(f, it.s) <= 0.0 || min_cone_eigenvalue(f, it.z) <= 0.0 || !(it.tau > 0.0) ||
                !(it.kappa > 0.0))
                {
                break;
            }
        } catch (const NumericalError&) {
            break;
        }
    }

    // Progress stalled: accept the best iterate at reduced accuracy.
    if (best_m.pres <= settings.reduced_tol && best_m.dres <= settings.reduced_tol &&
        best_m.gap <= settings.reduced_tol) {
        return finish(f, best, best_m, SocStatus::optimal, iter);
    }
    if (best_m.pinf <= settings.reduced_tol) {
        return finish(f, best, best_m, SocStatus::infeasible, iter);
    }
    return finish(f, best, best_m, SocStatus::max_iter, iter);
}

}  // namespace isac
