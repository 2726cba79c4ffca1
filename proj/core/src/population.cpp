#include "strata/population.hpp"

#include <cmath>
#include <utility>

#include "strata/errors.hpp"

namespace strata {

namespace {

constexpr double kProbSumTol = 1e-12;
constexpr double kSymmetryTol = 1e-12;

void validate_probabilities(const std::vector<double>& probs, const char* what) {
  if (probs.empty()) throw InvalidArgument(std::string(what) + " must be nonempty");
  double sum = 0.0;
  for (double p : probs) {
    if (!(p > 0.0)) throw InvalidArgument(std::string(what) + " must be strictly positive");
    sum += p;
  }
  if (std::abs(sum - 1.0) > kProbSumTol) {
    throw InvalidArgument(std::string(what) + " must sum to 1");
  }
}

}  // namespace

GroupDistribution::GroupDistribution(std::string kind, Vector mean, Matrix cov, Sampler sampler)
    : kind_(std::move(kind)), mean_(std::move(mean)), cov_(std::move(cov)),
      sampler_(std::move(sampler)) {
  if (mean_.size() < 1) throw InvalidArgument("group dimension must be at least 1");
  if (cov_.rows() != mean_.size() || cov_.cols() != mean_.size()) {
    throw InvalidArgument("analytic_cov shape must match the mean dimension");
  }
  if (!is_symmetric(cov_, kSymmetryTol)) {
    throw InvalidArgument("analytic_cov must be symmetric");
  }
}

GroupDistribution GroupDistribution::gaussian(Vector mean, Matrix cov) {
  // psd_square_root also rejects indefinite matrices.
  Matrix factor = psd_square_root(cov);
  const int d = static_cast<int>(mean.size());
  auto sampler = [mean, factor, d](Rng& rng) {
    Vector z(d);
    for (int i = 0; i < d; ++i) z[i] = rng.normal();
    return Vector(mean + factor * z);
  };
  return GroupDistribution("gaussian", std::move(mean), std::move(cov), std::move(sampler));
}

GroupDistribution GroupDistribution::uniform_box(Vector lo, Vector hi) {
  if (lo.size() != hi.size()) throw InvalidArgument("uniform_box: lo/hi dimension mismatch");
  const int d = static_cast<int>(lo.size());
  for (int i = 0; i < d; ++i) {
    if (!(lo[i] < hi[i])) throw InvalidArgument("uniform_box requires lo < hi per coordinate");
  }
  Vector mean = 0.5 * (lo + hi);
  Matrix cov = Matrix::Zero(d, d);
  for (int i = 0; i < d; ++i) {
    const double width = hi[i] - lo[i];
    cov(i, i) = width * width / 12.0;
  }
  auto sampler = [lo, hi, d](Rng& rng) {
    Vector y(d);
    for (int i = 0; i < d; ++i) y[i] = rng.uniform(lo[i], hi[i]);
    return y;
  };
  return GroupDistribution("uniform", std::move(mean), std::move(cov), std::move(sampler));
}

GroupDistribution GroupDistribution::shifted_exponential(double rate, double offset) {
  if (!(rate > 0.0)) throw InvalidArgument("shifted_exponential requires rate > 0");
  Vector mean(1);
  mean[0] = offset + 1.0 / rate;
  Matrix cov(1, 1);
  cov(0, 0) = 1.0 / (rate * rate);
  auto sampler = [rate, offset](Rng& rng) {
    Vector y(1);
    y[0] = offset + rng.exponential(rate);
    return y;
  };
  return GroupDistribution("exponential", std::move(mean), std::move(cov), std::move(sampler));
}

GroupDistribution GroupDistribution::custom(std::string kind, Vector analytic_mean,
                                            Matrix analytic_cov, Sampler sampler) {
  return GroupDistribution(std::move(kind), std::move(analytic_mean), std::move(analytic_cov),
                           std::move(sampler));
}

PopulationSpec::PopulationSpec(std::vector<double> group_probs,
                               std::vector<GroupDistribution> groups)
    : probs_(std::move(group_probs)), groups_(std::move(groups)) {
  if (groups_.empty()) throw InvalidArgument("population needs at least one group");
  if (probs_.size() != groups_.size()) {
    throw InvalidArgument("group_probs size must equal the number of groups");
  }
  validate_probabilities(probs_, "group_probs");
  const int d = groups_.front().dim();
  for (const auto& g : groups_) {
    if (g.dim() != d) throw InvalidArgument("all groups must share the same dimension");
  }
}

const GroupDistribution& PopulationSpec::group(int label) const {
  if (label < 1 || label > num_groups()) throw InvalidArgument("group label out of range");
  return groups_[static_cast<std::size_t>(label - 1)];
}

Vector true_mean(const PopulationSpec& spec) {
  Vector mean = Vector::Zero(spec.dim());
  for (int s = 1; s <= spec.num_groups(); ++s) {
    mean += spec.group_probs()[s - 1] * spec.group(s).analytic_mean();
  }
  return mean;
}

Matrix asymptotic_covariance(const PopulationSpec& spec, const std::vector<double>& fractions) {
  const int xi = spec.num_groups();
  if (static_cast<int>(fractions.size()) != xi) {
    throw InvalidArgument("fractions length must equal the number of groups");
  }
  for (double f : fractions) {
    // Single-group populations reduce to the classical iid CLT, where the
    // whole sample is the group; f = 1 is meaningful there.
    const bool ok = f > 0.0 && (f < 1.0 || (xi == 1 && f <= 1.0));
    if (!ok) throw InvalidArgument("group fractions must lie strictly inside (0,1)");
  }
  Matrix total = Matrix::Zero(spec.dim(), spec.dim());
  for (int s = 1; s <= xi; ++s) {
    const double p = spec.group_probs()[s - 1];
    total += (p * p / fractions[s - 1]) * spec.group(s).analytic_cov();
  }
  return total;
}

Vector sample_conditional(const GroupDistribution& group, Rng& rng) { return group.sample(rng); }

}  // namespace strata
