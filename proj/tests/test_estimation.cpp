#include <cmath>
#include <vector>

#include <doctest.h>

#include "strata/chi_square.hpp"
#include "strata/errors.hpp"
#include "strata/estimation.hpp"

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

Vector vec2(double x, double y) {
  Vector v(2);
  v << x, y;
  return v;
}

PopulationSpec two_gaussians_2d() {
  Matrix s1(2, 2);
  s1 << 1.0, 0.2, 0.2, 0.8;
  Matrix s2(2, 2);
  s2 << 1.5, -0.3, -0.3, 1.2;
  return PopulationSpec({0.5, 0.5}, {GroupDistribution::gaussian(vec2(0.0, 0.0), s1),
                                     GroupDistribution::gaussian(vec2(1.0, 0.5), s2)});
}

std::vector<Vector> gaussian_draws(int count, int dim, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Vector> values;
  values.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    Vector v(dim);
    for (int c = 0; c < dim; ++c) v[c] = rng.normal();
    values.push_back(v);
  }
  return values;
}

}  // namespace

TEST_CASE("group_mean basics") {
  CHECK(group_mean({vec1(1.0), vec1(2.0), vec1(3.0)})[0] == doctest::Approx(2.0));
  const Vector single = vec2(4.0, -1.0);
  CHECK(group_mean({single}) == single);
  CHECK_THROWS_AS(group_mean({}), EmptyGroupError);
}

TEST_CASE("group_mean matches a two-pass compensated oracle") {
  const auto values = gaussian_draws(1000, 2, 808);
  const Vector mean = group_mean(values);
  // Oracle: naive mean followed by a residual correction pass.
  Vector first = Vector::Zero(2);
  for (const auto& v : values) first += v;
  first /= static_cast<double>(values.size());
  Vector correction = Vector::Zero(2);
  for (const auto& v : values) correction += v - first;
  const Vector oracle = first + correction / static_cast<double>(values.size());
  CHECK((mean - oracle).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("group_mean is affine equivariant") {
  const auto values = gaussian_draws(200, 2, 11);
  Matrix a(2, 2);
  a << 2.0, 0.3, -0.5, 1.2;
  const Vector b = vec2(1.0, -2.0);
  std::vector<Vector> transformed;
  for (const auto& v : values) transformed.push_back(a * v + b);
  const Vector lhs = group_mean(transformed);
  const Vector rhs = a * group_mean(values) + b;
  CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("group_covariance basics") {
  const std::vector<Vector> identical = {vec2(1.0, 2.0), vec2(1.0, 2.0), vec2(1.0, 2.0)};
  CHECK(group_covariance(identical).norm() == 0.0);
  // d=1 values (0),(2): (1/(2-1))((0-1)^2 + (2-1)^2) = 2.
  CHECK(group_covariance({vec1(0.0), vec1(2.0)})(0, 0) == doctest::Approx(2.0));
  CHECK_THROWS_AS(group_covariance({vec1(1.0)}), InsufficientGroupSizeError);
  CHECK_THROWS_AS(group_covariance({}), InsufficientGroupSizeError);
}

TEST_CASE("group_covariance matches the naive double-loop oracle") {
  const auto values = gaussian_draws(500, 2, 909);
  const Matrix cov = group_covariance(values);
  const double m = static_cast<double>(values.size());
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      double mean_i = 0.0, mean_j = 0.0;
      for (const auto& v : values) {
        mean_i += v[i];
        mean_j += v[j];
      }
      mean_i /= m;
      mean_j /= m;
      double entry = 0.0;
      for (const auto& v : values) entry += (v[i] - mean_i) * (v[j] - mean_j);
      entry /= (m - 1.0);
      CHECK(std::abs(cov(i, j) - entry) < 1e-10);
    }
  }
  CHECK((cov - cov.transpose()).norm() == 0.0);
}

TEST_CASE("group_covariance transforms as A Sigma A^T and ignores translation") {
  const auto values = gaussian_draws(300, 2, 13);
  const Matrix base = group_covariance(values);

  const Vector shift = vec2(5.0, -3.0);
  std::vector<Vector> shifted;
  for (const auto& v : values) shifted.push_back(v + shift);
  CHECK((group_covariance(shifted) - base).cwiseAbs().maxCoeff() < 1e-10);

  Matrix a(2, 2);
  a << 1.5, -0.4, 0.2, 0.9;
  std::vector<Vector> mapped;
  for (const auto& v : values) mapped.push_back(a * v);
  CHECK((group_covariance(mapped) - a * base * a.transpose()).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("compute_weights: empirical and known") {
  const PopulationSpec spec = two_gaussians_2d();
  Rng rng(1);
  const auto empirical = compute_weights(WeightScheme::Empirical, {3, 7}, 10, spec, rng);
  CHECK(empirical == std::vector<double>{0.3, 0.7});
  const auto known = compute_weights(WeightScheme::Known, {3, 7}, 10, spec, rng);
  CHECK(known == spec.group_probs());
  CHECK_THROWS_AS(compute_weights(WeightScheme::Empirical, {3, 6}, 10, spec, rng),
                  InvalidArgument);
}

TEST_CASE("compute_weights: perturbed stays within the n^(-3/4) envelope") {
  const PopulationSpec spec = two_gaussians_2d();
  const std::int64_t n = 1000000;
  const double envelope = std::pow(static_cast<double>(n), -0.75) * 1.01;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Rng rng(seed);
    const auto weights = compute_weights(WeightScheme::Perturbed, {n / 2, n / 2}, n, spec, rng);
    double sum = 0.0;
    for (double w : weights) {
      CHECK(w >= 0.0);
      CHECK(w <= 1.0);
      sum += w;
    }
    CHECK(std::abs(sum - 1.0) <= 1e-12);
    CHECK(std::abs(weights[0] - 0.5) <= envelope);
    CHECK(std::abs(weights[1] - 0.5) <= envelope);
  }
}

TEST_CASE("stratified_mean basics") {
  CHECK(stratified_mean({vec1(3.5)}, {1.0})[0] == doctest::Approx(3.5));
  CHECK(stratified_mean({vec1(0.0), vec1(2.0)}, {0.5, 0.5})[0] == doctest::Approx(1.0));
  const Vector combined =
      stratified_mean({vec2(1.0, 0.0), vec2(0.0, 1.0)}, {0.3, 0.7});
  CHECK(combined[0] == doctest::Approx(0.3).epsilon(1e-14));
  CHECK(combined[1] == doctest::Approx(0.7).epsilon(1e-14));
  CHECK_THROWS_AS(stratified_mean({vec1(1.0)}, {0.5, 0.5}), InvalidArgument);
}

TEST_CASE("empirical-weight stratified mean equals the pooled mean exactly") {
  Matrix s1(2, 2);
  s1 << 1.0, 0.1, 0.1, 1.0;
  PopulationSpec spec({0.5, 0.3, 0.2},
                      {GroupDistribution::gaussian(vec2(0.0, 0.0), s1),
                       GroupDistribution::gaussian(vec2(2.0, -1.0), Matrix::Identity(2, 2)),
                       GroupDistribution::uniform_box(vec2(-1.0, -1.0), vec2(1.0, 1.0))});
  const MembershipProcess process = MembershipProcess::iid({0.5, 0.3, 0.2});
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(derive_stream_seed(99, seed, 200));
    const SampleBatch batch = draw_batch(spec, process, 200, rng);
    const EstimateReport report = make_report(batch, WeightScheme::Empirical, spec, rng);
    Vector pooled = Vector::Zero(2);
    for (const auto& y : batch.ys) pooled += y;
    pooled /= static_cast<double>(batch.n);
    CHECK((report.stratified_mean - pooled).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("make_report recomputes its own stratified mean and keeps symmetry") {
  const PopulationSpec spec = two_gaussians_2d();
  const MembershipProcess process = MembershipProcess::iid({0.5, 0.5});
  Rng rng(31);
  const SampleBatch batch = draw_batch(spec, process, 400, rng);
  const EstimateReport report = make_report(batch, WeightScheme::Empirical, spec, rng);
  const Vector recomputed = stratified_mean(report.group_means, report.weights);
  CHECK((report.stratified_mean - recomputed).cwiseAbs().maxCoeff() == 0.0);
  for (const auto& cov : report.group_covs) {
    CHECK((cov - cov.transpose()).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("wald_statistic: d=1 single-group hand values") {
  // Values (0),(2): mu=1, sigma^2=2, N=n=2, lambda=1.
  // Pooled matrix = n*lambda^2/N * sigma^2 = 2; statistic = n(mu-t)^2/2.
  EstimateReport report;
  report.n = 2;
  report.weights = {1.0};
  report.counts = {2};
  report.group_means = {vec1(1.0)};
  report.group_covs = {mat1(2.0)};
  report.stratified_mean = vec1(1.0);

  CHECK(wald_statistic(report, vec1(1.0)) == doctest::Approx(0.0));
  CHECK(wald_statistic(report, vec1(0.0)) == doctest::Approx(1.0).epsilon(1e-14));
  // Symmetric targets around the estimate give equal statistics.
  CHECK(wald_statistic(report, vec1(1.0 + 0.37)) ==
        doctest::Approx(wald_statistic(report, vec1(1.0 - 0.37))).epsilon(1e-14));
}

TEST_CASE("wald_statistic error paths") {
  EstimateReport report;
  report.n = 3;
  report.weights = {2.0 / 3.0, 1.0 / 3.0};
  report.counts = {2, 1};  // second group too small
  report.group_means = {vec1(0.0), vec1(1.0)};
  report.group_covs = {mat1(1.0), mat1(1.0)};
  report.stratified_mean = vec1(0.5);
  CHECK_THROWS_AS(wald_statistic(report, vec1(0.0)), InsufficientGroupSizeError);

  report.counts = {2, 1 + 1};
  report.n = 4;
  report.group_covs = {mat1(0.0), mat1(0.0)};  // zero-variance pooled matrix
  CHECK_THROWS_AS(wald_statistic(report, vec1(0.0)), SingularCovarianceError);
}

TEST_CASE("wald_statistic is invariant under linear recoordinatization") {
  const PopulationSpec spec = two_gaussians_2d();
  const MembershipProcess process = MembershipProcess::iid({0.5, 0.5});
  Rng rng(77);
  const SampleBatch batch = draw_batch(spec, process, 500, rng);
  Rng weights_rng(5);
  const EstimateReport report = make_report(batch, WeightScheme::Empirical, spec, weights_rng);

  Matrix map(2, 2);
  map << 2.0, 0.3, -0.5, 1.2;
  SampleBatch mapped = batch;
  for (auto& y : mapped.ys) y = map * y;
  Rng weights_rng2(5);
  const EstimateReport mapped_report =
      make_report(mapped, WeightScheme::Empirical, spec, weights_rng2);

  const Vector target = vec2(0.4, 0.1);
  const double original = wald_statistic(report, target);
  const double transformed = wald_statistic(mapped_report, map * target);
  CHECK(std::abs(original - transformed) < 1e-8 * std::max(1.0, original));
}

TEST_CASE("region_contains: center, extreme alpha, and the flip point") {
  const PopulationSpec spec = two_gaussians_2d();
  const MembershipProcess process = MembershipProcess::iid({0.5, 0.5});
  Rng rng(123);
  const SampleBatch batch = draw_batch(spec, process, 600, rng);
  const EstimateReport report = make_report(batch, WeightScheme::Empirical, spec, rng);

  CHECK(region_contains(report, report.stratified_mean, 0.05));
  CHECK(region_contains(report, report.stratified_mean, 0.9999));

  // Near-degenerate alpha shrinks the region to essentially the center.
  const Vector off = report.stratified_mean + vec2(0.5, 0.5);
  CHECK_FALSE(region_contains(report, off, 0.9999));

  // Sweep along a ray: membership flips exactly once, where the statistic
  // crosses the chi-square quantile (bisection oracle).
  const Vector direction = vec2(1.0, 0.25).normalized();
  const double quantile = chi_square_quantile(0.95, 2);
  auto inside = [&](double t) {
    return region_contains(report, report.stratified_mean + t * direction, 0.05);
  };
  REQUIRE(inside(0.0));
  REQUIRE_FALSE(inside(10.0));
  double lo = 0.0, hi = 10.0;
  int flips = 0;
  bool previous = true;
  for (int i = 1; i <= 2000; ++i) {
    const bool now = inside(10.0 * i / 2000.0);
    if (now != previous) ++flips;
    previous = now;
  }
  CHECK(flips == 1);
  for (int i = 0; i < 80; ++i) {
    const double mid = 0.5 * (lo + hi);
    (inside(mid) ? lo : hi) = mid;
  }
  const double statistic_at_flip =
      wald_statistic(report, report.stratified_mean + 0.5 * (lo + hi) * direction);
  CHECK(statistic_at_flip == doctest::Approx(quantile).epsilon(1e-6));
}
