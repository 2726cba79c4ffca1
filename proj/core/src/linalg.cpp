#include "strata/linalg.hpp"

#include <algorithm>
#include <cmath>

#include "strata/errors.hpp"

namespace strata {

bool is_symmetric(const Matrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < m.cols(); ++j) {
      if (std::abs(m(i, j) - m(j, i)) > tol) return false;
    }
  }
  return true;
}

Matrix cholesky_factor(const Matrix& m) {
  const Eigen::Index d = m.rows();
  if (d == 0 || m.cols() != d) {
    throw InvalidArgument("cholesky_factor: matrix must be square and nonempty");
  }
  const double max_diag = m.diagonal().maxCoeff();
  const double pivot_floor = kCholeskyPivotRelTol * std::max(max_diag, 0.0);

  Matrix lower = Matrix::Zero(d, d);
  for (Eigen::Index j = 0; j < d; ++j) {
    double pivot = m(j, j);
    for (Eigen::Index k = 0; k < j; ++k) pivot -= lower(j, k) * lower(j, k);
    if (!(pivot > pivot_floor)) {
      throw SingularCovarianceError("pooled matrix is not positive definite");
    }
    lower(j, j) = std::sqrt(pivot);
    for (Eigen::Index i = j + 1; i < d; ++i) {
      double sum = m(i, j);
      for (Eigen::Index k = 0; k < j; ++k) sum -= lower(i, k) * lower(j, k);
      lower(i, j) = sum / lower(j, j);
    }
  }
  return lower;
}

bool is_positive_definite(const Matrix& m) {
  try {
    cholesky_factor(m);
    return true;
  } catch (const SingularCovarianceError&) {
    return false;
  }
}

Matrix psd_square_root(const Matrix& m, double tol) {
  if (m.rows() != m.cols()) {
    throw InvalidArgument("psd_square_root: matrix must be square");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(m);
  if (eig.info() != Eigen::Success) {
    throw InvalidArgument("psd_square_root: eigendecomposition failed");
  }
  const Vector& values = eig.eigenvalues();
  const double scale = std::max(1.0, values.cwiseAbs().maxCoeff());
  if (values.minCoeff() < -tol * scale) {
    throw InvalidArgument("covariance matrix is not positive semi-definite");
  }
  Vector roots = values.cwiseMax(0.0).cwiseSqrt();
  return eig.eigenvectors() * roots.asDiagonal();
}

double quadratic_form_inverse(const Matrix& chol_lower, const Vector& v) {
  Vector w = chol_lower.triangularView<Eigen::Lower>().solve(v);
  return w.squaredNorm();
}

}  // namespace strata
