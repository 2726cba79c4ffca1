#include <cmath>
#include <vector>

#include <doctest.h>

#include "strata/errors.hpp"
#include "strata/population.hpp"

using namespace strata;

namespace {

Vector vec1(double x) {
  Vector v(1);
  v << x;
  return v;
}

Matrix mat1(double x) {
  Matrix m(1, 1);
  m << x;
  return m;
}

PopulationSpec two_gaussians(double p1, double mu1, double var1, double mu2, double var2) {
  return PopulationSpec({p1, 1.0 - p1},
                        {GroupDistribution::gaussian(vec1(mu1), mat1(var1)),
                         GroupDistribution::gaussian(vec1(mu2), mat1(var2))});
}

}  // namespace

TEST_CASE("true_mean: single group is the identity") {
  Vector mean(2);
  mean << 2.0, 3.0;
  PopulationSpec spec({1.0}, {GroupDistribution::gaussian(mean, Matrix::Identity(2, 2))});
  CHECK((true_mean(spec) - mean).norm() == 0.0);
}

TEST_CASE("true_mean: symmetric zero means cancel") {
  const PopulationSpec spec = two_gaussians(0.5, 0.0, 1.0, 0.0, 2.0);
  CHECK(true_mean(spec)[0] == 0.0);
}

TEST_CASE("true_mean: weighted combination, hand value") {
  // 0.3*1 + 0.7*2 = 1.7
  const PopulationSpec spec = two_gaussians(0.3, 1.0, 1.0, 2.0, 1.0);
  CHECK(true_mean(spec)[0] == doctest::Approx(1.7).epsilon(1e-14));
}

TEST_CASE("true_mean is linear in the group means") {
  const double c = -3.75;
  const PopulationSpec spec = two_gaussians(0.3, 1.25, 1.0, -0.5, 2.0);
  const PopulationSpec scaled = two_gaussians(0.3, c * 1.25, 1.0, c * -0.5, 2.0);
  CHECK(true_mean(scaled)[0] == doctest::Approx(c * true_mean(spec)[0]).epsilon(1e-14));
}

TEST_CASE("asymptotic_covariance: hand-evaluated cases") {
  // Single group, P(S=1)=1: f=1 is allowed and the result is Sigma itself.
  Matrix sigma(2, 2);
  sigma << 1.5, 0.25, 0.25, 0.75;
  PopulationSpec single({1.0}, {GroupDistribution::gaussian(Vector::Zero(2), sigma)});
  CHECK((asymptotic_covariance(single, {1.0}) - sigma).norm() < 1e-15);

  // 0.25/0.5 + 0.25/0.5 = 1.0
  const PopulationSpec spec = two_gaussians(0.5, 0.0, 1.0, 1.0, 1.0);
  CHECK(asymptotic_covariance(spec, {0.5, 0.5})(0, 0) == doctest::Approx(1.0).epsilon(1e-14));

  // 0.25/0.9 + 0.25/0.1 = 25/9 = 2.7778...
  CHECK(asymptotic_covariance(spec, {0.9, 0.1})(0, 0) ==
        doctest::Approx(25.0 / 9.0).epsilon(1e-14));
}

TEST_CASE("asymptotic_covariance rejects fractions outside (0,1)") {
  const PopulationSpec spec = two_gaussians(0.5, 0.0, 1.0, 1.0, 1.0);
  CHECK_THROWS_AS(asymptotic_covariance(spec, {1.0, 0.5}), InvalidArgument);
  CHECK_THROWS_AS(asymptotic_covariance(spec, {0.0, 1.0}), InvalidArgument);
  CHECK_THROWS_AS(asymptotic_covariance(spec, {-0.1, 1.1}), InvalidArgument);
  CHECK_THROWS_AS(asymptotic_covariance(spec, {0.5}), InvalidArgument);
}

TEST_CASE("asymptotic_covariance is symmetric and PSD (Cholesky succeeds)") {
  Matrix s1(2, 2);
  s1 << 2.0, 0.6, 0.6, 1.0;
  Matrix s2(2, 2);
  s2 << 0.5, -0.1, -0.1, 0.9;
  Vector m1 = Vector::Zero(2);
  PopulationSpec spec({0.4, 0.6}, {GroupDistribution::gaussian(m1, s1),
                                   GroupDistribution::gaussian(m1, s2)});
  const Matrix v = asymptotic_covariance(spec, {0.3, 0.7});
  CHECK((v - v.transpose()).norm() == 0.0);
  CHECK_NOTHROW(cholesky_factor(v));
}

TEST_CASE("degenerate gaussian is a point mass") {
  const GroupDistribution group = GroupDistribution::gaussian(vec1(5.0), mat1(0.0));
  Rng rng(1);
  for (int i = 0; i < 100; ++i) CHECK(sample_conditional(group, rng)[0] == 5.0);
}

TEST_CASE("uniform box sample mean is near the midpoint") {
  const GroupDistribution group =
      GroupDistribution::uniform_box(vec1(0.0), vec1(1.0));
  Rng rng(20240601);
  const int n = 100000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += group.sample(rng)[0];
  CHECK(std::abs(sum / n - 0.5) < 0.01);
}

TEST_CASE("shifted exponential sample variance is near 1/rate^2") {
  const GroupDistribution group = GroupDistribution::shifted_exponential(1.0, 0.0);
  CHECK(group.analytic_mean()[0] == doctest::Approx(1.0));
  CHECK(group.analytic_cov()(0, 0) == doctest::Approx(1.0));
  Rng rng(90125);
  const int n = 100000;
  double sum = 0.0;
  double sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = group.sample(rng)[0];
    sum += x;
    sq += x * x;
  }
  const double mean = sum / n;
  CHECK(std::abs(sq / n - mean * mean - 1.0) < 0.05);
}

TEST_CASE("every kind matches its analytic moments within 4 MC standard errors") {
  Matrix cov(2, 2);
  cov << 1.0, 0.4, 0.4, 0.5;
  Vector mean(2);
  mean << -1.0, 2.0;
  Vector lo(2), hi(2);
  lo << 0.0, -2.0;
  hi << 3.0, 2.0;
  const std::vector<GroupDistribution> groups = {
      GroupDistribution::gaussian(mean, cov),
      GroupDistribution::uniform_box(lo, hi),
      GroupDistribution::shifted_exponential(2.0, -1.0),
  };

  const int n = 100000;
  std::uint64_t seed = 7700;
  for (const auto& group : groups) {
    CAPTURE(group.kind());
    Rng rng(seed++);
    const int d = group.dim();
    Vector sum = Vector::Zero(d);
    Matrix outer = Matrix::Zero(d, d);
    std::vector<Vector> draws;
    draws.reserve(n);
    for (int i = 0; i < n; ++i) {
      draws.push_back(group.sample(rng));
      sum += draws.back();
    }
    const Vector sample_mean = sum / n;
    for (const auto& y : draws) {
      const Vector c = y - sample_mean;
      outer += c * c.transpose();
    }
    const Matrix sample_cov = outer / (n - 1);

    const Vector& mu = group.analytic_mean();
    const Matrix& sigma = group.analytic_cov();
    for (int i = 0; i < d; ++i) {
      CHECK(std::abs(sample_mean[i] - mu[i]) < 4.0 * std::sqrt(sigma(i, i) / n));
      for (int j = 0; j < d; ++j) {
        // Gaussian-moment approximation of Var(cov_ij); adequate as a 4-sigma
        // screen for all three kinds at this n.
        const double se =
            std::sqrt((sigma(i, i) * sigma(j, j) + sigma(i, j) * sigma(i, j)) / n);
        CHECK(std::abs(sample_cov(i, j) - sigma(i, j)) < 4.0 * std::max(se, 1e-12));
      }
    }
  }
}

TEST_CASE("custom kind plugs into the same seam") {
  // Rademacher-like two-point law with exact moments.
  auto sampler = [](Rng& rng) {
    Vector v(1);
    v << (rng.uniform01() < 0.5 ? -1.0 : 1.0);
    return v;
  };
  const GroupDistribution group =
      GroupDistribution::custom("rademacher", vec1(0.0), mat1(1.0), sampler);
  CHECK(group.kind() == "rademacher");
  Rng rng(3);
  const Vector draw = group.sample(rng);
  CHECK((draw[0] == 1.0 || draw[0] == -1.0));
}

TEST_CASE("construction-time validation") {
  CHECK_THROWS_AS(PopulationSpec({0.5, 0.6},
                                 {GroupDistribution::gaussian(vec1(0.0), mat1(1.0)),
                                  GroupDistribution::gaussian(vec1(1.0), mat1(1.0))}),
                  InvalidArgument);
  CHECK_THROWS_AS(PopulationSpec({1.0, 0.0},
                                 {GroupDistribution::gaussian(vec1(0.0), mat1(1.0)),
                                  GroupDistribution::gaussian(vec1(1.0), mat1(1.0))}),
                  InvalidArgument);
  // Dimension mismatch across groups.
  CHECK_THROWS_AS(
      PopulationSpec({0.5, 0.5},
                     {GroupDistribution::gaussian(Vector::Zero(2), Matrix::Identity(2, 2)),
                      GroupDistribution::gaussian(vec1(1.0), mat1(1.0))}),
      InvalidArgument);
  // Asymmetric covariance.
  Matrix bad(2, 2);
  bad << 1.0, 0.2, 0.3, 1.0;
  CHECK_THROWS_AS(GroupDistribution::gaussian(Vector::Zero(2), bad), InvalidArgument);
  // Indefinite covariance.
  Matrix indefinite(2, 2);
  indefinite << 1.0, 2.0, 2.0, 1.0;
  CHECK_THROWS_AS(GroupDistribution::gaussian(Vector::Zero(2), indefinite), InvalidArgument);
  CHECK_THROWS_AS(GroupDistribution::uniform_box(vec1(1.0), vec1(0.0)), InvalidArgument);
  CHECK_THROWS_AS(GroupDistribution::shifted_exponential(0.0, 1.0), InvalidArgument);
}
