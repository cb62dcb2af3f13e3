// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>

#include <Eigen/Dense>

namespace isac {

using cdouble = std::complex<double>;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

/// Relative tolerance below which negative eigenvalues count as round-off.
inline constexpr double kPsdTolerance = 1e-12;

/// Principal square root of a Hermitian PSD matrix via eigen-decomposition;
/// eigenvalues in [-tol*max, 0) are clipped. Throws NumericalError when the
/// input is not PSD within tolerance.
MatrixXcd hermitian_sqrt(const MatrixXcd& m, double tol = kPsdTolerance);
MatrixXd symmetric_sqrt(const MatrixXd& m, double tol = kPsdTolerance);

/// Smallest eigenvalue divided by the largest magnitude eigenvalue (0 for the zero matrix).
double relative_min_eigenvalue(const MatrixXcd& m);

bool is_hermitian(const MatrixXcd& m, double tol = 1e-12);

}  // namespace isac
