#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "strata/population.hpp"

namespace strata {

/// Generator of the membership sequence S_1, S_2, … . Three kinds:
///  - schedule: deterministic repetition of a fixed label pattern
///  - iid: every index drawn from the same categorical law
///  - incentivized: independent draws whose probabilities switch from
///    base_probs to a boosted, renormalized vector after phase_start draws
/// All labels are 1-based.
class MembershipProcess {
 public:
  enum class Kind { Iid, Schedule, Incentivized };

  static MembershipProcess iid(std::vector<double> probs);
  static MembershipProcess schedule(std::vector<int> pattern, int num_groups);
  static MembershipProcess incentivized(std::vector<double> base_probs, int boost_group,
                                        double boost_factor, std::int64_t phase_start);

  Kind kind() const noexcept { return kind_; }
  int num_groups() const noexcept { return num_groups_; }
  bool is_deterministic() const noexcept { return kind_ == Kind::Schedule; }

  /// Membership probabilities governing the draw at 1-based index i.
  /// Schedule kind returns a point mass on the scheduled label.
  std::vector<double> probabilities_at(std::int64_t index) const;

  /// Limits N_n^s/n → f_s implied by the process.
  std::vector<double> limiting_fractions() const;

  /// S_1, …, S_n. Schedule kind never touches the rng; the random kinds
  /// draw every index independently.
  std::vector<int> generate(std::int64_t n, Rng& rng) const;

 private:
  MembershipProcess() = default;

  Kind kind_ = Kind::Iid;
  int num_groups_ = 0;
  std::vector<double> probs_;        // iid
  std::vector<int> pattern_;         // schedule
  std::vector<double> base_probs_;   // incentivized
  std::vector<double> boosted_probs_;
  std::int64_t phase_start_ = 0;
};

/// A realized combined sample {(Y_i, S_i)} with the derived group counts.
struct SampleBatch {
  std::int64_t n = 0;
  std::vector<Vector> ys;
  std::vector<int> ss;
  std::vector<std::int64_t> counts;  // counts[s-1] = N_n^s
};

/// One group's extracted subsample: 1-based positions within the combined
/// sample (in increasing order) and the values at those positions.
struct GroupView {
  int group = 0;
  std::vector<std::int64_t> indices;
  std::vector<Vector> values;
};

/// 1-based positions i with ss[i-1] == label, in increasing order.
std::vector<std::int64_t> extraction_indices(std::span<const int> ss, int label);

/// counts[s-1] = #{i : ss[i] == s} for s in 1..num_groups.
std::vector<std::int64_t> group_counts(std::span<const int> ss, int num_groups);

/// Draw a full batch: memberships first, then each Y_i from the group law of
/// its S_i, in index order.
SampleBatch draw_batch(const PopulationSpec& spec, const MembershipProcess& process,
                       std::int64_t n, Rng& rng);

GroupView extract_group(const SampleBatch& batch, int label);

}  // namespace strata
