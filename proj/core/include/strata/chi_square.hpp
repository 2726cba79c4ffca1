#pragma once

namespace strata {

/// Regularized lower incomplete gamma P(a, x); series for x < a+1,
/// Lentz continued fraction otherwise.
double regularized_gamma_p(double a, double x);

/// χ² CDF with d degrees of freedom: P(d/2, x/2).
double chi_square_cdf(double x, int dof);

/// χ² density; x > 0.
double chi_square_pdf(double x, int dof);

/// p-quantile of the χ² distribution with d degrees of freedom, p ∈ [0,1).
/// Wilson-Hilferty start, then Newton on the regularized incomplete gamma
/// with a bisection bracket as safeguard; residual tolerance 1e-12 (tighter
/// than the 1e-10 contract), at most 100 Newton steps.
double chi_square_quantile(double p, int dof);

}  // namespace strata
