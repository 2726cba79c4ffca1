#pragma once

#include <Eigen/Dense>

namespace strata {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Relative pivot tolerance used by the positive-definite Cholesky check.
inline constexpr double kCholeskyPivotRelTol = 1e-12;

bool is_symmetric(const Matrix& m, double tol);

/// Lower-triangular L with m = L·Lᵀ. Throws SingularCovarianceError when a
/// pivot falls at or below kCholeskyPivotRelTol times the largest diagonal
/// entry of m (this is the library-wide non-PD detection rule).
Matrix cholesky_factor(const Matrix& m);

/// True iff cholesky_factor(m) would succeed.
bool is_positive_definite(const Matrix& m);

/// B with m = B·Bᵀ for symmetric positive SEMI-definite m, built from the
/// eigendecomposition with negative eigenvalues clamped at zero. Throws
/// InvalidArgument if m has an eigenvalue below -tol·max(1, |λ|max).
Matrix psd_square_root(const Matrix& m, double tol = 1e-10);

/// vᵀ·(L·Lᵀ)⁻¹·v given the lower Cholesky factor L.
double quadratic_form_inverse(const Matrix& chol_lower, const Vector& v);

}  // namespace strata
