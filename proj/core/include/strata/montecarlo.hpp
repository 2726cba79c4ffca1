#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "strata/estimation.hpp"
#include "strata/membership.hpp"
#include "strata/population.hpp"

namespace strata {

enum class ExperimentKind { Coverage, Consistency, Clt, Independence, RandomIndex };

const char* experiment_kind_name(ExperimentKind kind);

/// Full description of one experiment run. Replication r at sample size n
/// always uses the stream derive_stream_seed(base_seed, r, n), so results
/// are reproducible and independent of threading.
struct ExperimentConfig {
  PopulationSpec spec;
  MembershipProcess process;
  WeightScheme weight_scheme = WeightScheme::Empirical;
  std::vector<std::int64_t> n_grid;
  std::int64_t replications = 0;
  double alpha = 0.05;
  std::uint64_t base_seed = 0;
  ExperimentKind experiment = ExperimentKind::Coverage;
};

/// Throws InvalidArgument unless replications ≥ 1, n_grid is nonempty and
/// strictly increasing, alpha ∈ (0,1) and the process matches the spec.
void validate_experiment_config(const ExperimentConfig& config);

/// One aggregate row of an experiment (one sample size).
struct ResultRow {
  std::int64_t n = 0;
  std::int64_t replications = 0;
  std::int64_t discarded = 0;
  std::vector<std::pair<std::string, double>> stats;  // fixed order per experiment

  std::int64_t r_effective() const noexcept { return replications - discarded; }
  double stat(const std::string& name) const;  // throws if absent
};

struct ExperimentResult {
  ExperimentKind kind = ExperimentKind::Coverage;
  std::vector<ResultRow> rows;
  std::vector<std::pair<std::string, double>> summary;
  std::vector<std::pair<std::string, Matrix>> matrices;  // JSON-only extras

  double summary_stat(const std::string& name) const;  // throws if absent
};

struct RunOptions {
  /// Worker threads for the replication loop; 0 means one per hardware
  /// thread. Aggregation is an ordered fold, so the thread count never
  /// changes the result.
  int threads = 0;
};

/// Confidence-region coverage of the true mean across the n_grid.
ExperimentResult run_coverage(const ExperimentConfig& config, const RunOptions& options = {});

/// Mean ‖μ̂_n − E(Y)‖ trajectory across the n_grid.
ExperimentResult run_consistency(const ExperimentConfig& config, const RunOptions& options = {});

/// Distribution of √n(μ̂_n − E Y) at the largest n: empirical covariance
/// against the analytic asymptotic covariance, plus normality moments.
ExperimentResult run_clt(const ExperimentConfig& config, const RunOptions& options = {});

/// Independence/identity diagnostics for the extracted subsamples at the
/// largest n: correlations over replications and extracted-moment checks.
ExperimentResult run_independence(const ExperimentConfig& config, const RunOptions& options = {});

/// Random-index limit diagnostics: running group means evaluated at the
/// random sizes N_n^s along the grid, and √N(μ̂ − μ) moments at the top.
ExperimentResult run_random_index(const ExperimentConfig& config, const RunOptions& options = {});

/// Dispatch on config.experiment.
ExperimentResult run_experiment(const ExperimentConfig& config, const RunOptions& options = {});

}  // namespace strata
