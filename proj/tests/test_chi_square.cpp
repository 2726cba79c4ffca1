#include <cmath>
#include <vector>

#include <doctest.h>

#include "strata/chi_square.hpp"
#include "strata/errors.hpp"

using namespace strata;

namespace {

// Quadrature oracle, independent of the incomplete-gamma path. Substituting
// x = u^2 removes the d=1 endpoint singularity:
//   F(q; d) = ∫_0^√q 2 u^{d-1} e^{-u²/2} du / (2^{d/2} Γ(d/2)),
// integrated with composite Simpson.
double chi_square_cdf_by_quadrature(double q, int dof) {
  if (q <= 0.0) return 0.0;
  const double upper = std::sqrt(q);
  const int panels = 20000;  // even
  const double h = upper / panels;
  auto integrand = [dof](double u) {
    return 2.0 * std::pow(u, dof - 1) * std::exp(-0.5 * u * u);
  };
  double sum = integrand(0.0) + integrand(upper);
  for (int i = 1; i < panels; ++i) {
    sum += integrand(h * i) * (i % 2 == 1 ? 4.0 : 2.0);
  }
  const double integral = sum * h / 3.0;
  return integral / (std::pow(2.0, 0.5 * dof) * std::tgamma(0.5 * dof));
}

double chi_square_quantile_by_quadrature(double p, int dof) {
  double lo = 0.0;
  double hi = 1.0;
  while (chi_square_cdf_by_quadrature(hi, dof) < p) hi *= 2.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (chi_square_cdf_by_quadrature(mid, dof) < p) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo < 1e-12 * (1.0 + hi)) break;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("quantile at p=0 is 0") {
  for (int d = 1; d <= 5; ++d) CHECK(chi_square_quantile(0.0, d) == 0.0);
}

TEST_CASE("reference quantiles") {
  CHECK(chi_square_quantile(0.95, 1) == doctest::Approx(3.84146).epsilon(1e-6));
  // d=2 has the closed form -2 ln(1-p).
  for (double p : {0.5, 0.9, 0.95, 0.99}) {
    CHECK(std::abs(chi_square_quantile(p, 2) - (-2.0 * std::log(1.0 - p))) < 1e-10);
  }
}

TEST_CASE("quantiles match the numerical-integration oracle to 1e-8") {
  for (int d = 1; d <= 10; ++d) {
    for (double p : {0.5, 0.9, 0.95, 0.99}) {
      CAPTURE(d);
      CAPTURE(p);
      const double quantile = chi_square_quantile(p, d);
      const double oracle = chi_square_quantile_by_quadrature(p, d);
      CHECK(std::abs(quantile - oracle) < 1e-8);
    }
  }
}

TEST_CASE("cdf(quantile(p)) returns p to the stated tolerance") {
  for (int d : {1, 2, 3, 7, 10, 25}) {
    for (double p : {1e-6, 0.01, 0.3, 0.5, 0.75, 0.95, 0.999, 0.999999}) {
      CHECK(std::abs(chi_square_cdf(chi_square_quantile(p, d), d) - p) < 1e-10);
    }
  }
}

TEST_CASE("quantile is strictly increasing in p and in d") {
  const std::vector<double> ps = {0.05, 0.1, 0.25, 0.5, 0.75, 0.9, 0.95, 0.99};
  for (int d = 1; d <= 10; ++d) {
    for (std::size_t i = 1; i < ps.size(); ++i) {
      CHECK(chi_square_quantile(ps[i], d) > chi_square_quantile(ps[i - 1], d));
    }
  }
  for (double p : ps) {
    for (int d = 2; d <= 10; ++d) {
      CHECK(chi_square_quantile(p, d) > chi_square_quantile(p, d - 1));
    }
  }
}

TEST_CASE("domain errors") {
  CHECK_THROWS_AS(chi_square_quantile(-0.1, 1), InvalidArgument);
  CHECK_THROWS_AS(chi_square_quantile(1.0, 1), InvalidArgument);
  CHECK_THROWS_AS(chi_square_quantile(1.5, 1), InvalidArgument);
  CHECK_THROWS_AS(chi_square_quantile(0.5, 0), InvalidArgument);
  CHECK_THROWS_AS(regularized_gamma_p(0.0, 1.0), InvalidArgument);
  CHECK_THROWS_AS(regularized_gamma_p(1.0, -1.0), InvalidArgument);
}

TEST_CASE("regularized gamma basics") {
  CHECK(regularized_gamma_p(0.5, 0.0) == 0.0);
  // P(1, x) = 1 - e^{-x}.
  for (double x : {0.1, 1.0, 3.0, 10.0}) {
    CHECK(std::abs(regularized_gamma_p(1.0, x) - (1.0 - std::exp(-x))) < 1e-14);
  }
}
