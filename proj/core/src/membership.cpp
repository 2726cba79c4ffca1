#include "strata/membership.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "strata/errors.hpp"

namespace strata {

namespace {

void validate_probs(const std::vector<double>& probs, const char* what) {
  if (probs.empty()) throw InvalidArgument(std::string(what) + " must be nonempty");
  double sum = 0.0;
  for (double p : probs) {
    if (!(p > 0.0)) throw InvalidArgument(std::string(what) + " must be strictly positive");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-12) throw InvalidArgument(std::string(what) + " must sum to 1");
}

}  // namespace

MembershipProcess MembershipProcess::iid(std::vector<double> probs) {
  validate_probs(probs, "membership probs");
  MembershipProcess process;
  process.kind_ = Kind::Iid;
  process.num_groups_ = static_cast<int>(probs.size());
  process.probs_ = std::move(probs);
  return process;
}

MembershipProcess MembershipProcess::schedule(std::vector<int> pattern, int num_groups) {
  if (num_groups < 1) throw InvalidArgument("num_groups must be at least 1");
  if (pattern.empty()) throw InvalidArgument("schedule pattern must be nonempty");
  std::vector<bool> seen(static_cast<std::size_t>(num_groups), false);
  for (int label : pattern) {
    if (label < 1 || label > num_groups) {
      throw InvalidArgument("schedule pattern labels must lie in 1..num_groups");
    }
    seen[static_cast<std::size_t>(label - 1)] = true;
  }
  // Every group must recur, otherwise N_n^s stalls for some s.
  if (!std::all_of(seen.begin(), seen.end(), [](bool b) { return b; })) {
    throw InvalidArgument("schedule pattern must contain every group label");
  }
  MembershipProcess process;
  process.kind_ = Kind::Schedule;
  process.num_groups_ = num_groups;
  process.pattern_ = std::move(pattern);
  return process;
}

MembershipProcess MembershipProcess::incentivized(std::vector<double> base_probs, int boost_group,
                                                  double boost_factor, std::int64_t phase_start) {
  validate_probs(base_probs, "membership base_probs");
  const int xi = static_cast<int>(base_probs.size());
  if (boost_group < 1 || boost_group > xi) {
    throw InvalidArgument("boost_group must lie in 1..num_groups");
  }
  if (!(boost_factor > 0.0)) throw InvalidArgument("boost_factor must be positive");
  if (phase_start < 0) throw InvalidArgument("phase_start must be nonnegative");

  MembershipProcess process;
  process.kind_ = Kind::Incentivized;
  process.num_groups_ = xi;
  process.base_probs_ = std::move(base_probs);
  process.boosted_probs_ = process.base_probs_;
  process.boosted_probs_[static_cast<std::size_t>(boost_group - 1)] *= boost_factor;
  double sum = 0.0;
  for (double p : process.boosted_probs_) sum += p;
  for (double& p : process.boosted_probs_) p /= sum;
  process.phase_start_ = phase_start;
  return process;
}

std::vector<double> MembershipProcess::probabilities_at(std::int64_t index) const {
  if (index < 1) throw InvalidArgument("membership index is 1-based");
  switch (kind_) {
    case Kind::Iid:
      return probs_;
    case Kind::Incentivized:
      return index <= phase_start_ ? base_probs_ : boosted_probs_;
    case Kind::Schedule: {
      std::vector<double> point(static_cast<std::size_t>(num_groups_), 0.0);
      const auto pos = static_cast<std::size_t>((index - 1) % static_cast<std::int64_t>(pattern_.size()));
      point[static_cast<std::size_t>(pattern_[pos] - 1)] = 1.0;
      return point;
    }
  }
  throw InvalidArgument("unreachable membership kind");
}

std::vector<double> MembershipProcess::limiting_fractions() const {
  switch (kind_) {
    case Kind::Iid:
      return probs_;
    case Kind::Incentivized:
      // The base phase has a fixed length, so only the boosted law survives
      // in the limit.
      return boosted_probs_;
    case Kind::Schedule: {
      std::vector<double> fractions(static_cast<std::size_t>(num_groups_), 0.0);
      for (int label : pattern_) fractions[static_cast<std::size_t>(label - 1)] += 1.0;
      for (double& f : fractions) f /= static_cast<double>(pattern_.size());
      return fractions;
    }
  }
  throw InvalidArgument("unreachable membership kind");
}

std::vector<int> MembershipProcess::generate(std::int64_t n, Rng& rng) const {
  if (n < 1) throw InvalidArgument("sample size must be at least 1");
  std::vector<int> labels(static_cast<std::size_t>(n));
  switch (kind_) {
    case Kind::Schedule: {
      const auto len = static_cast<std::int64_t>(pattern_.size());
      for (std::int64_t i = 0; i < n; ++i) {
        labels[static_cast<std::size_t>(i)] = pattern_[static_cast<std::size_t>(i % len)];
      }
      break;
    }
    case Kind::Iid: {
      for (std::int64_t i = 0; i < n; ++i) {
        labels[static_cast<std::size_t>(i)] = static_cast<int>(rng.categorical(probs_)) + 1;
      }
      break;
    }
    case Kind::Incentivized: {
      for (std::int64_t i = 0; i < n; ++i) {
        const auto& probs = (i + 1 <= phase_start_) ? base_probs_ : boosted_probs_;
        labels[static_cast<std::size_t>(i)] = static_cast<int>(rng.categorical(probs)) + 1;
      }
      break;
    }
  }
  return labels;
}

std::vector<std::int64_t> extraction_indices(std::span<const int> ss, int label) {
  std::vector<std::int64_t> indices;
  for (std::size_t i = 0; i < ss.size(); ++i) {
    if (ss[i] == label) indices.push_back(static_cast<std::int64_t>(i) + 1);
  }
  return indices;
}

std::vector<std::int64_t> group_counts(std::span<const int> ss, int num_groups) {
  if (num_groups < 1) throw InvalidArgument("num_groups must be at least 1");
  std::vector<std::int64_t> counts(static_cast<std::size_t>(num_groups), 0);
  for (int label : ss) {
    if (label < 1 || label > num_groups) throw InvalidArgument("label out of range");
    ++counts[static_cast<std::size_t>(label - 1)];
  }
  return counts;
}

SampleBatch draw_batch(const PopulationSpec& spec, const MembershipProcess& process,
                       std::int64_t n, Rng& rng) {
  if (process.num_groups() != spec.num_groups()) {
    throw InvalidArgument("membership process and population disagree on the number of groups");
  }
  SampleBatch batch;
  batch.n = n;
  batch.ss = process.generate(n, rng);
  batch.ys.reserve(static_cast<std::size_t>(n));
  for (int label : batch.ss) batch.ys.push_back(spec.group(label).sample(rng));
  batch.counts = group_counts(batch.ss, spec.num_groups());
  return batch;
}

GroupView extract_group(const SampleBatch& batch, int label) {
  GroupView view;
  view.group = label;
  view.indices = extraction_indices(batch.ss, label);
  view.values.reserve(view.indices.size());
  for (std::int64_t index : view.indices) {
    view.values.push_back(batch.ys[static_cast<std::size_t>(index - 1)]);
  }
  return view;
}

}  // namespace strata
