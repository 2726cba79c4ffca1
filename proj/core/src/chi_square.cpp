#include "strata/chi_square.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "strata/errors.hpp"

namespace strata {

namespace {

constexpr int kMaxSeriesIterations = 500;
constexpr double kSeriesEps = 1e-16;

// Lower-tail series: P(a,x) = x^a e^{-x} / Γ(a+1) · Σ_k x^k / ((a+1)…(a+k)).
double gamma_p_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  double denom = a;
  for (int k = 0; k < kMaxSeriesIterations; ++k) {
    denom += 1.0;
    term *= x / denom;
    sum += term;
    if (std::abs(term) < std::abs(sum) * kSeriesEps) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Upper-tail continued fraction (modified Lentz) for Q(a,x).
double gamma_q_continued_fraction(double a, double x) {
  constexpr double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= kMaxSeriesIterations; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kSeriesEps) break;
  }
  return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Acklam's rational approximation of the standard normal quantile; only used
// to seed Newton, so its ~1e-9 accuracy is more than enough.
double normal_quantile_approx(double p) {
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;

  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p > 1.0 - p_low) {
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double q = p - 0.5;
  const double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

}  // namespace

double regularized_gamma_p(double a, double x) {
  if (!(a > 0.0)) throw InvalidArgument("regularized_gamma_p requires a > 0");
  if (x < 0.0) throw InvalidArgument("regularized_gamma_p requires x >= 0");
  if (x == 0.0) return 0.0;
  if (x < a + 1.0) return gamma_p_series(a, x);
  return 1.0 - gamma_q_continued_fraction(a, x);
}

double chi_square_cdf(double x, int dof) {
  if (dof < 1) throw InvalidArgument("degrees of freedom must be at least 1");
  if (x <= 0.0) return 0.0;
  return regularized_gamma_p(0.5 * dof, 0.5 * x);
}

double chi_square_pdf(double x, int dof) {
  if (dof < 1) throw InvalidArgument("degrees of freedom must be at least 1");
  if (x <= 0.0) return 0.0;
  const double half = 0.5 * dof;
  return std::exp((half - 1.0) * std::log(x) - 0.5 * x - half * std::numbers::ln2 -
                  std::lgamma(half));
}

double chi_square_quantile(double p, int dof) {
  if (dof < 1) throw InvalidArgument("degrees of freedom must be at least 1");
  if (!(p >= 0.0 && p < 1.0)) throw InvalidArgument("quantile level must lie in [0, 1)");
  if (p == 0.0) return 0.0;

  const double d = static_cast<double>(dof);

  // Wilson-Hilferty: χ²_p ≈ d(1 - 2/(9d) + z√(2/(9d)))³.
  const double z = normal_quantile_approx(p);
  const double wh = 1.0 - 2.0 / (9.0 * d) + z * std::sqrt(2.0 / (9.0 * d));
  double x = d * wh * wh * wh;
  if (!(x > 0.0)) x = 0.5;

  // Bracket the root, then let Newton run inside it.
  double lo = 0.0;
  double hi = std::max(x, 1.0);
  while (chi_square_cdf(hi, dof) < p) {
    lo = hi;
    hi *= 2.0;
  }
  if (x <= lo || x >= hi) x = 0.5 * (lo + hi);

  constexpr double kResidualTol = 1e-12;
  for (int iteration = 0; iteration < 100; ++iteration) {
    const double residual = chi_square_cdf(x, dof) - p;
    if (std::abs(residual) <= kResidualTol) break;
    if (residual > 0.0) {
      hi = x;
    } else {
      lo = x;
    }
    const double derivative = chi_square_pdf(x, dof);
    double next = x - residual / derivative;
    if (!(derivative > 0.0) || next <= lo || next >= hi) next = 0.5 * (lo + hi);
    x = next;
  }
  return x;
}

}  // namespace strata
