// SPDX-License-Identifier: Apache-2.0
#include "isac/linalg.hpp"

#include <algorithm>

#include "isac/errors.hpp"

namespace isac {

namespace {

template <typename Matrix>
Matrix sqrt_impl(const Matrix& m, double tol)
{
    if (m.rows() != m.cols()) {
        throw NumericalError("square root of a non-square matrix");
    }
    if (m.size() == 0) {
        return m;
    }
    Eigen::SelfAdjointEigenSolver<Matrix> eig(m);
    if (eig.info() != Eigen::Success) {
        throw NumericalError("eigen-decomposition failed");
    }
    VectorXd values = eig.eigenvalues();
    const double scale = std::max(values.cwiseAbs().maxCoeff(), 0.0);
    if (values.minCoeff() < -tol * scale) {
        throw NumericalError("matrix is not positive semi-definite");
    }
    values = values.cwiseMax(0.0).cwiseSqrt();
    return eig.eigenvectors() * values.asDiagonal() * eig.eigenvectors().adjoint();
}

}  // namespace

MatrixXcd hermitian_sqrt(const MatrixXcd& m, double tol) { return sqrt_impl(m, tol); }

MatrixXd symmetric_sqrt(const MatrixXd& m, double tol) { return sqrt_impl(m, tol); }

double relative_min_eigenvalue(const MatrixXcd& m)
{
    if (m.size() == 0) return 0.0;
    Eigen::SelfAdjointEigenSolver<MatrixXcd> eig(m, Eigen::EigenvaluesOnly);
    const VectorXd& v = eig.eigenvalues();
    const double scale = v.cwiseAbs().maxCoeff();
    return scale > 0.0 ? v.minCoeff() / scale : 0.0;
}

bool is_hermitian(const MatrixXcd& m, double tol)
{
    if (m.rows() != m.cols()) return false;
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol * scale;
}

}  // namespace isac
