#include "strata/estimation.hpp"

#include <cmath>

#include "strata/chi_square.hpp"
#include "strata/errors.hpp"

namespace strata {

Vector group_mean(const std::vector<Vector>& values) {
  if (values.empty()) throw EmptyGroupError("group mean of an empty group");
  Vector sum = Vector::Zero(values.front().size());
  for (const Vector& value : values) {
    if (value.size() != sum.size()) throw InvalidArgument("mixed dimensions in group values");
    sum += value;
  }
  return sum / static_cast<double>(values.size());
}

Matrix group_covariance(const std::vector<Vector>& values) {
  const auto m = static_cast<std::int64_t>(values.size());
  if (m < 2) {
    throw InsufficientGroupSizeError("group covariance needs at least two observations");
  }
  const Vector mean = group_mean(values);
  Matrix cov = Matrix::Zero(mean.size(), mean.size());
  for (const Vector& value : values) {
    const Vector centered = value - mean;
    cov += centered * centered.transpose();
  }
  return cov / static_cast<double>(m - 1);
}

std::vector<double> compute_weights(WeightScheme scheme, const std::vector<std::int64_t>& counts,
                                    std::int64_t n, const PopulationSpec& spec, Rng& rng) {
  if (n < 1) throw InvalidArgument("n must be at least 1");
  const std::size_t xi = counts.size();
  if (static_cast<int>(xi) != spec.num_groups()) {
    throw InvalidArgument("counts length must equal the number of groups");
  }
  std::int64_t total = 0;
  for (std::int64_t c : counts) total += c;
  if (total != n) throw InvalidArgument("counts must sum to n");

  switch (scheme) {
    case WeightScheme::Empirical: {
      std::vector<double> weights(xi);
      for (std::size_t s = 0; s < xi; ++s) {
        weights[s] = static_cast<double>(counts[s]) / static_cast<double>(n);
      }
      return weights;
    }
    case WeightScheme::Known:
      return spec.group_probs();
    case WeightScheme::Perturbed: {
      const double scale = std::pow(static_cast<double>(n), -0.75);
      std::vector<double> weights(xi);
      double sum = 0.0;
      for (std::size_t s = 0; s < xi; ++s) {
        const double perturbed = spec.group_probs()[s] + scale * rng.uniform(-1.0, 1.0);
        weights[s] = std::max(perturbed, 0.0);
        sum += weights[s];
      }
      if (sum <= 0.0) return spec.group_probs();  // all entries clamped; tiny-n corner
      for (double& w : weights) w /= sum;
      return weights;
    }
  }
  throw InvalidArgument("unreachable weight scheme");
}

Vector stratified_mean(const std::vector<Vector>& group_means,
                       const std::vector<double>& weights) {
  if (group_means.size() != weights.size()) {
    throw InvalidArgument("group_means and weights must have equal length");
  }
  if (group_means.empty()) throw InvalidArgument("stratified mean of zero groups");
  Vector combined = Vector::Zero(group_means.front().size());
  for (std::size_t s = 0; s < group_means.size(); ++s) {
    if (group_means[s].size() != combined.size()) {
      throw InvalidArgument("mixed dimensions in group means");
    }
    combined += weights[s] * group_means[s];
  }
  return combined;
}

EstimateReport make_report(const SampleBatch& batch, WeightScheme scheme,
                           const PopulationSpec& spec, Rng& rng) {
  EstimateReport report;
  report.n = batch.n;
  report.counts = batch.counts;
  const int xi = spec.num_groups();
  report.group_means.reserve(static_cast<std::size_t>(xi));
  report.group_covs.reserve(static_cast<std::size_t>(xi));
  for (int s = 1; s <= xi; ++s) {
    GroupView view = extract_group(batch, s);
    report.group_means.push_back(group_mean(view.values));
    report.group_covs.push_back(group_covariance(view.values));
  }
  report.weights = compute_weights(scheme, batch.counts, batch.n, spec, rng);
  report.stratified_mean = stratified_mean(report.group_means, report.weights);
  return report;
}

double wald_statistic(const EstimateReport& report, const Vector& target) {
  if (target.size() != report.stratified_mean.size()) {
    throw InvalidArgument("target dimension mismatch");
  }
  const double n = static_cast<double>(report.n);
  Matrix pooled = Matrix::Zero(report.dim(), report.dim());
  for (int s = 0; s < report.num_groups(); ++s) {
    if (report.counts[static_cast<std::size_t>(s)] < 2) {
      throw InsufficientGroupSizeError("Wald statistic needs at least two observations per group");
    }
    const double lambda = report.weights[static_cast<std::size_t>(s)];
    const double count = static_cast<double>(report.counts[static_cast<std::size_t>(s)]);
    pooled += (n * lambda * lambda / count) * report.group_covs[static_cast<std::size_t>(s)];
  }
  const Matrix lower = cholesky_factor(pooled);  // throws SingularCovarianceError
  const Vector diff = report.stratified_mean - target;
  return n * quadratic_form_inverse(lower, diff);
}

bool region_contains(const EstimateReport& report, const Vector& target, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidArgument("alpha must lie in (0,1)");
  return wald_statistic(report, target) < chi_square_quantile(1.0 - alpha, report.dim());
}

}  // namespace strata
