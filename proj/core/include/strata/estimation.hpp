#pragma once

#include <cstdint>
#include <vector>

#include "strata/membership.hpp"
#include "strata/population.hpp"

namespace strata {

/// How the weights λ̂_n^s combining the group means are produced.
///  - Empirical: λ̂_n^s = N_n^s / n
///  - Known:     λ̂_n^s = P(S=s) from the population spec
///  - Perturbed: λ̂_n^s ∝ P(S=s) + n^{-3/4}·U_s with U_s uniform on (-1,1),
///    renormalized (negative entries clamped at 0 first)
enum class WeightScheme { Empirical, Known, Perturbed };

/// Everything the inference step needs from one realized batch.
struct EstimateReport {
  std::int64_t n = 0;
  std::vector<double> weights;       // λ̂_n^s
  std::vector<Vector> group_means;   // μ̂^s
  std::vector<Matrix> group_covs;    // Σ̂^s_n
  std::vector<std::int64_t> counts;  // N_n^s
  Vector stratified_mean;            // μ̂_n = Σ_s λ̂_n^s μ̂^s

  int dim() const noexcept { return static_cast<int>(stratified_mean.size()); }
  int num_groups() const noexcept { return static_cast<int>(weights.size()); }
};

/// Coordinate-wise arithmetic mean. Throws EmptyGroupError on empty input.
Vector group_mean(const std::vector<Vector>& values);

/// Sample covariance with divisor m-1, accumulated as outer products around
/// the two-pass mean. Throws InsufficientGroupSizeError for m < 2.
Matrix group_covariance(const std::vector<Vector>& values);

std::vector<double> compute_weights(WeightScheme scheme, const std::vector<std::int64_t>& counts,
                                    std::int64_t n, const PopulationSpec& spec, Rng& rng);

/// Σ_s weights[s]·means[s].
Vector stratified_mean(const std::vector<Vector>& group_means, const std::vector<double>& weights);

/// Assemble the full report for a batch: per-group means and covariances,
/// weights under the given scheme, and the combined stratified mean. Throws
/// the estimation errors when any group has fewer than two observations.
EstimateReport make_report(const SampleBatch& batch, WeightScheme scheme,
                           const PopulationSpec& spec, Rng& rng);

/// Wald statistic n(μ̂_n−t)ᵀ M⁻¹ (μ̂_n−t) with the pooled matrix
/// M = Σ_s (n·λ̂_s²/N_s)·Σ̂_s. Throws InsufficientGroupSizeError when some
/// N_s < 2 and SingularCovarianceError when M is not positive definite.
double wald_statistic(const EstimateReport& report, const Vector& target);

/// True iff the target lies inside the (1−α) Wald confidence region,
/// i.e. wald_statistic < χ²_{1−α, d}.
bool region_contains(const EstimateReport& report, const Vector& target, double alpha);

}  // namespace strata
