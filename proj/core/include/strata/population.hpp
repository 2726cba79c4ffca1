#pragma once

#include <functional>
#include <string>
#include <vector>

#include "strata/linalg.hpp"
#include "strata/rng.hpp"

namespace strata {

/// One group's conditional distribution Y | S = s, with analytically known
/// mean and covariance. Built via the named factories; `custom` is the
/// registration seam for additional kinds with closed-form moments.
class GroupDistribution {
 public:
  using Sampler = std::function<Vector(Rng&)>;

  /// Multivariate normal. Degenerate (rank-deficient PSD) covariance is
  /// allowed; the factor is computed once here via a semi-definite square
  /// root.
  static GroupDistribution gaussian(Vector mean, Matrix cov);

  /// Independent coordinates, each uniform on [lo_i, hi_i).
  static GroupDistribution uniform_box(Vector lo, Vector hi);

  /// offset + Exp(rate); one-dimensional only.
  static GroupDistribution shifted_exponential(double rate, double offset);

  /// Arbitrary kind supplied by the caller; moments must be exact.
  static GroupDistribution custom(std::string kind, Vector analytic_mean, Matrix analytic_cov,
                                  Sampler sampler);

  int dim() const noexcept { return static_cast<int>(mean_.size()); }
  const std::string& kind() const noexcept { return kind_; }
  const Vector& analytic_mean() const noexcept { return mean_; }
  const Matrix& analytic_cov() const noexcept { return cov_; }

  /// One draw from the group law; deterministic given the rng state.
  Vector sample(Rng& rng) const { return sampler_(rng); }

 private:
  GroupDistribution(std::string kind, Vector mean, Matrix cov, Sampler sampler);

  std::string kind_;
  Vector mean_;
  Matrix cov_;
  Sampler sampler_;
};

/// Joint law of (Y, S): strictly positive group probabilities summing to 1
/// and one GroupDistribution per group, all of the same dimension.
/// Immutable after construction; shareable across threads.
class PopulationSpec {
 public:
  PopulationSpec(std::vector<double> group_probs, std::vector<GroupDistribution> groups);

  int num_groups() const noexcept { return static_cast<int>(groups_.size()); }
  int dim() const noexcept { return groups_.front().dim(); }
  const std::vector<double>& group_probs() const noexcept { return probs_; }

  /// Group by 1-based label s ∈ {1, …, ξ}.
  const GroupDistribution& group(int label) const;

 private:
  std::vector<double> probs_;
  std::vector<GroupDistribution> groups_;
};

/// E(Y) = Σ_s P(S=s)·μ^s.
Vector true_mean(const PopulationSpec& spec);

/// Σ_s [P(S=s)²/f_s]·Σ^s, the limiting covariance of √n(μ̂_n − E Y).
/// Each f_s must lie in (0,1); a single-group spec may use f = (1).
Matrix asymptotic_covariance(const PopulationSpec& spec, const std::vector<double>& fractions);

/// One draw from the group law (same as group.sample; kept as a free
/// function mirroring the rest of the sampling API).
Vector sample_conditional(const GroupDistribution& group, Rng& rng);

}  // namespace strata
