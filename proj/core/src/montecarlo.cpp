#include "strata/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <limits>
#include <mutex>
#include <optional>
#include <thread>

#include "strata/errors.hpp"
#include "strata/rng.hpp"

namespace strata {

namespace {

/// Runs body(r) for r in [0, count). Work items are claimed dynamically, but
/// every record is written to its own slot, so callers fold in index order
/// and results never depend on the thread count.
void parallel_replications(std::int64_t count, int threads,
                           const std::function<void(std::int64_t)>& body) {
  int workers = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::max(1, std::min<int>(workers, static_cast<int>(count)));
  if (workers == 1) {
    for (std::int64_t r = 0; r < count; ++r) body(r);
    return;
  }
  std::atomic<std::int64_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      while (true) {
        const std::int64_t r = next.fetch_add(1);
        if (r >= count) return;
        try {
          body(r);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& worker : pool) worker.join();
  if (first_error) std::rethrow_exception(first_error);
}

/// Pearson correlation; returns 0 when either side has no variance
/// (deterministic regressors such as scheduled counts hit this on purpose).
double pearson_correlation(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) return 0.0;
  double mean_x = 0.0;
  double mean_y = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mean_x += x[i];
    mean_y += y[i];
  }
  mean_x /= static_cast<double>(n);
  mean_y /= static_cast<double>(n);
  double sxx = 0.0;
  double syy = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mean_x;
    const double dy = y[i] - mean_y;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (!(sxx > 0.0) || !(syy > 0.0)) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

void require_kind(const ExperimentConfig& config, ExperimentKind kind) {
  if (config.experiment != kind) {
    throw InvalidArgument(std::string("config.experiment must be ") + experiment_kind_name(kind));
  }
}

std::string coord_name(const char* prefix, int group, int coord) {
  return std::string(prefix) + "_g" + std::to_string(group) + "_" + std::to_string(coord);
}

}  // namespace

const char* experiment_kind_name(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::Coverage: return "coverage";
    case ExperimentKind::Consistency: return "consistency";
    case ExperimentKind::Clt: return "clt";
    case ExperimentKind::Independence: return "independence";
    case ExperimentKind::RandomIndex: return "random_index";
  }
  return "unknown";
}

void validate_experiment_config(const ExperimentConfig& config) {
  if (config.replications < 1) throw InvalidArgument("replications must be at least 1");
  if (config.n_grid.empty()) throw InvalidArgument("n_grid must be nonempty");
  std::int64_t previous = 0;
  for (std::int64_t n : config.n_grid) {
    if (n <= previous) throw InvalidArgument("n_grid must be strictly increasing and positive");
    previous = n;
  }
  if (!(config.alpha > 0.0 && config.alpha < 1.0)) {
    throw InvalidArgument("alpha must lie in (0,1)");
  }
  if (config.process.num_groups() != config.spec.num_groups()) {
    throw InvalidArgument("membership process and population disagree on the number of groups");
  }
}

double ResultRow::stat(const std::string& name) const {
  for (const auto& [key, value] : stats) {
    if (key == name) return value;
  }
  throw InvalidArgument("no such row stat: " + name);
}

double ExperimentResult::summary_stat(const std::string& name) const {
  for (const auto& [key, value] : summary) {
    if (key == name) return value;
  }
  throw InvalidArgument("no such summary stat: " + name);
}

ExperimentResult run_coverage(const ExperimentConfig& config, const RunOptions& options) {
  validate_experiment_config(config);
  require_kind(config, ExperimentKind::Coverage);
  const Vector target = true_mean(config.spec);
  const std::int64_t total = config.replications;

  ExperimentResult result;
  result.kind = ExperimentKind::Coverage;
  for (const std::int64_t n : config.n_grid) {
    enum : std::int8_t { kMiss = 0, kHit = 1, kDiscard = 2 };
    std::vector<std::int8_t> outcomes(static_cast<std::size_t>(total), kMiss);
    parallel_replications(total, options.threads, [&](std::int64_t r) {
      Rng rng(derive_stream_seed(config.base_seed, static_cast<std::uint64_t>(r),
                                 static_cast<std::uint64_t>(n)));
      const SampleBatch batch = draw_batch(config.spec, config.process, n, rng);
      try {
        const EstimateReport report = make_report(batch, config.weight_scheme, config.spec, rng);
        outcomes[static_cast<std::size_t>(r)] =
            region_contains(report, target, config.alpha) ? kHit : kMiss;
      } catch (const EstimationError&) {
        outcomes[static_cast<std::size_t>(r)] = kDiscard;
      }
    });

    std::int64_t hits = 0;
    std::int64_t discarded = 0;
    for (const std::int8_t outcome : outcomes) {
      if (outcome == kDiscard) {
        ++discarded;
      } else if (outcome == kHit) {
        ++hits;
      }
    }
    const std::int64_t effective = total - discarded;
    const double coverage =
        effective > 0 ? static_cast<double>(hits) / static_cast<double>(effective) : 0.0;
    const double stderr_mc =
        effective > 0 ? std::sqrt(coverage * (1.0 - coverage) / static_cast<double>(effective))
                      : 0.0;
    ResultRow row;
    row.n = n;
    row.replications = total;
    row.discarded = discarded;
    row.stats = {{"coverage", coverage}, {"mc_stderr", stderr_mc}};
    result.rows.push_back(std::move(row));
  }
  return result;
}

ExperimentResult run_consistency(const ExperimentConfig& config, const RunOptions& options) {
  validate_experiment_config(config);
  require_kind(config, ExperimentKind::Consistency);
  const Vector target = true_mean(config.spec);
  const std::int64_t total = config.replications;
  constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

  ExperimentResult result;
  result.kind = ExperimentKind::Consistency;
  for (const std::int64_t n : config.n_grid) {
    std::vector<double> errors(static_cast<std::size_t>(total), kMissing);
    parallel_replications(total, options.threads, [&](std::int64_t r) {
      Rng rng(derive_stream_seed(config.base_seed, static_cast<std::uint64_t>(r),
                                 static_cast<std::uint64_t>(n)));
      const SampleBatch batch = draw_batch(config.spec, config.process, n, rng);
      try {
        const EstimateReport report = make_report(batch, config.weight_scheme, config.spec, rng);
        errors[static_cast<std::size_t>(r)] = (report.stratified_mean - target).norm();
      } catch (const EstimationError&) {
        // leave as missing
      }
    });

    std::int64_t effective = 0;
    double sum = 0.0;
    for (const double e : errors) {
      if (!std::isnan(e)) {
        ++effective;
        sum += e;
      }
    }
    const double mean = effective > 0 ? sum / static_cast<double>(effective) : 0.0;
    double sq = 0.0;
    for (const double e : errors) {
      if (!std::isnan(e)) sq += (e - mean) * (e - mean);
    }
    const double stderr_mc =
        effective > 1 ? std::sqrt(sq / static_cast<double>(effective - 1) /
                                  static_cast<double>(effective))
                      : 0.0;
    ResultRow row;
    row.n = n;
    row.replications = total;
    row.discarded = total - effective;
    row.stats = {{"mean_error_norm", mean}, {"mc_stderr", stderr_mc}};
    result.rows.push_back(std::move(row));
  }

  bool decreasing = result.rows.size() > 1;
  for (std::size_t i = 1; i < result.rows.size(); ++i) {
    if (!(result.rows[i].stat("mean_error_norm") < result.rows[i - 1].stat("mean_error_norm"))) {
      decreasing = false;
    }
  }
  result.summary = {{"strictly_decreasing", decreasing ? 1.0 : 0.0}};
  return result;
}

ExperimentResult run_clt(const ExperimentConfig& config, const RunOptions& options) {
  validate_experiment_config(config);
  require_kind(config, ExperimentKind::Clt);
  const Vector target = true_mean(config.spec);
  const std::int64_t n = config.n_grid.back();
  const std::int64_t total = config.replications;
  const int dim = config.spec.dim();
  const double root_n = std::sqrt(static_cast<double>(n));

  std::vector<std::optional<Vector>> zs(static_cast<std::size_t>(total));
  parallel_replications(total, options.threads, [&](std::int64_t r) {
    Rng rng(derive_stream_seed(config.base_seed, static_cast<std::uint64_t>(r),
                               static_cast<std::uint64_t>(n)));
    const SampleBatch batch = draw_batch(config.spec, config.process, n, rng);
    try {
      const EstimateReport report = make_report(batch, config.weight_scheme, config.spec, rng);
      zs[static_cast<std::size_t>(r)] = root_n * (report.stratified_mean - target);
    } catch (const EstimationError&) {
      // leave as missing
    }
  });

  std::int64_t effective = 0;
  Vector mean = Vector::Zero(dim);
  for (const auto& z : zs) {
    if (z) {
      ++effective;
      mean += *z;
    }
  }
  if (effective > 0) mean /= static_cast<double>(effective);

  Matrix cov = Matrix::Zero(dim, dim);
  Vector m2 = Vector::Zero(dim);
  Vector m3 = Vector::Zero(dim);
  Vector m4 = Vector::Zero(dim);
  for (const auto& z : zs) {
    if (!z) continue;
    const Vector centered = *z - mean;
    cov += centered * centered.transpose();
    for (int c = 0; c < dim; ++c) {
      const double v = centered[c];
      m2[c] += v * v;
      m3[c] += v * v * v;
      m4[c] += v * v * v * v;
    }
  }
  if (effective > 1) cov /= static_cast<double>(effective - 1);

  const Matrix analytic =
      asymptotic_covariance(config.spec, config.process.limiting_fractions());

  ResultRow row;
  row.n = n;
  row.replications = total;
  row.discarded = total - effective;
  row.stats.emplace_back("frobenius_gap", (cov - analytic).norm());
  for (int c = 0; c < dim; ++c) {
    row.stats.emplace_back("z_mean_" + std::to_string(c), mean[c]);
  }
  for (int c = 0; c < dim; ++c) {
    const double denom = static_cast<double>(std::max<std::int64_t>(effective, 1));
    const double variance = m2[c] / denom;
    const double sd = std::sqrt(variance);
    const double skewness = sd > 0.0 ? (m3[c] / denom) / (sd * sd * sd) : 0.0;
    const double kurtosis = sd > 0.0 ? (m4[c] / denom) / (variance * variance) : 0.0;
    row.stats.emplace_back("skewness_" + std::to_string(c), skewness);
    row.stats.emplace_back("kurtosis_" + std::to_string(c), kurtosis);
  }

  ExperimentResult result;
  result.kind = ExperimentKind::Clt;
  result.rows.push_back(std::move(row));
  result.matrices.emplace_back("z_cov", cov);
  result.matrices.emplace_back("asymptotic_cov", analytic);
  return result;
}

ExperimentResult run_independence(const ExperimentConfig& config, const RunOptions& options) {
  validate_experiment_config(config);
  require_kind(config, ExperimentKind::Independence);
  const std::int64_t n = config.n_grid.back();
  const std::int64_t total = config.replications;
  const int xi = config.spec.num_groups();
  constexpr int kExtracted = 3;  // Y_(1), Y_(2), Y_(3)

  // records[r] holds per-group counts plus the first three extracted values.
  struct Record {
    std::vector<double> counts;
    std::vector<std::optional<Vector>> extracted;  // xi * kExtracted, group-major
  };
  std::vector<Record> records(static_cast<std::size_t>(total));

  parallel_replications(total, options.threads, [&](std::int64_t r) {
    Rng rng(derive_stream_seed(config.base_seed, static_cast<std::uint64_t>(r),
                               static_cast<std::uint64_t>(n)));
    const SampleBatch batch = draw_batch(config.spec, config.process, n, rng);
    Record& record = records[static_cast<std::size_t>(r)];
    record.counts.assign(static_cast<std::size_t>(xi), 0.0);
    record.extracted.assign(static_cast<std::size_t>(xi * kExtracted), std::nullopt);
    std::vector<int> seen(static_cast<std::size_t>(xi), 0);
    for (std::int64_t i = 0; i < batch.n; ++i) {
      const int s = batch.ss[static_cast<std::size_t>(i)];
      record.counts[static_cast<std::size_t>(s - 1)] += 1.0;
      int& already = seen[static_cast<std::size_t>(s - 1)];
      if (already < kExtracted) {
        record.extracted[static_cast<std::size_t>((s - 1) * kExtracted + already)] =
            batch.ys[static_cast<std::size_t>(i)];
        ++already;
      }
    }
  });

  auto extracted_coord = [&](const Record& record, int s, int j) -> std::optional<double> {
    const auto& value = record.extracted[static_cast<std::size_t>((s - 1) * kExtracted + (j - 1))];
    if (!value) return std::nullopt;
    return (*value)[0];
  };

  ResultRow row;
  row.n = n;
  row.replications = total;
  row.discarded = 0;
  for (const Record& record : records) {
    bool complete = true;
    for (int s = 1; s <= xi; ++s) {
      if (record.counts[static_cast<std::size_t>(s - 1)] < kExtracted) complete = false;
    }
    if (!complete) ++row.discarded;
  }

  // corr(N^s, Y_(1)^s[0]) per group.
  for (int s = 1; s <= xi; ++s) {
    std::vector<double> counts;
    std::vector<double> firsts;
    for (const Record& record : records) {
      const auto y = extracted_coord(record, s, 1);
      if (!y) continue;
      counts.push_back(record.counts[static_cast<std::size_t>(s - 1)]);
      firsts.push_back(*y);
    }
    row.stats.emplace_back("corr_count_y1_g" + std::to_string(s),
                           pearson_correlation(counts, firsts));
  }
  // corr(Y_(1)^s[0], Y_(2)^s[0]) per group.
  for (int s = 1; s <= xi; ++s) {
    std::vector<double> first;
    std::vector<double> second;
    for (const Record& record : records) {
      const auto y1 = extracted_coord(record, s, 1);
      const auto y2 = extracted_coord(record, s, 2);
      if (!y1 || !y2) continue;
      first.push_back(*y1);
      second.push_back(*y2);
    }
    row.stats.emplace_back("corr_y1_y2_g" + std::to_string(s),
                           pearson_correlation(first, second));
  }
  // corr(Y_(1)^s[0], Y_(1)^t[0]) across group pairs.
  for (int s = 1; s <= xi; ++s) {
    for (int t = s + 1; t <= xi; ++t) {
      std::vector<double> left;
      std::vector<double> right;
      for (const Record& record : records) {
        const auto ys = extracted_coord(record, s, 1);
        const auto yt = extracted_coord(record, t, 1);
        if (!ys || !yt) continue;
        left.push_back(*ys);
        right.push_back(*yt);
      }
      row.stats.emplace_back("corr_y1_g" + std::to_string(s) + "_y1_g" + std::to_string(t),
                             pearson_correlation(left, right));
    }
  }
  // Identity-of-law check: mean and covariance of Y_(j)^s against the group
  // moments, each reported as the worst entry deviation in MC-standard-error
  // units.
  const int dim = config.spec.dim();
  std::vector<std::pair<std::string, double>> cov_stats;
  for (int j = 1; j <= kExtracted; ++j) {
    for (int s = 1; s <= xi; ++s) {
      const Vector& mu = config.spec.group(s).analytic_mean();
      const Matrix& sigma = config.spec.group(s).analytic_cov();
      const std::size_t slot = static_cast<std::size_t>((s - 1) * kExtracted + (j - 1));
      Vector sum = Vector::Zero(dim);
      std::int64_t present = 0;
      for (const Record& record : records) {
        if (!record.extracted[slot]) continue;
        sum += *record.extracted[slot];
        ++present;
      }
      double worst_mean = 0.0;
      double worst_cov = 0.0;
      if (present > 1) {
        const Vector mean = sum / static_cast<double>(present);
        Matrix cov = Matrix::Zero(dim, dim);
        for (const Record& record : records) {
          if (!record.extracted[slot]) continue;
          const Vector centered = *record.extracted[slot] - mean;
          cov += centered * centered.transpose();
        }
        cov /= static_cast<double>(present - 1);
        for (int c = 0; c < dim; ++c) {
          const double se = std::sqrt(sigma(c, c) / static_cast<double>(present));
          worst_mean = std::max(worst_mean, std::abs(mean[c] - mu[c]) / std::max(se, 1e-300));
          for (int c2 = 0; c2 < dim; ++c2) {
            // Gaussian-moment approximation of Var(cov entry).
            const double cov_se = std::sqrt((sigma(c, c) * sigma(c2, c2) +
                                             sigma(c, c2) * sigma(c, c2)) /
                                            static_cast<double>(present));
            worst_cov = std::max(worst_cov, std::abs(cov(c, c2) - sigma(c, c2)) /
                                                std::max(cov_se, 1e-300));
          }
        }
      }
      row.stats.emplace_back("mean_dev_sigmas_y" + std::to_string(j) + "_g" + std::to_string(s),
                             worst_mean);
      cov_stats.emplace_back("cov_dev_sigmas_y" + std::to_string(j) + "_g" + std::to_string(s),
                             worst_cov);
    }
  }
  row.stats.insert(row.stats.end(), cov_stats.begin(), cov_stats.end());

  ExperimentResult result;
  result.kind = ExperimentKind::Independence;
  result.rows.push_back(std::move(row));
  return result;
}

ExperimentResult run_random_index(const ExperimentConfig& config, const RunOptions& options) {
  validate_experiment_config(config);
  require_kind(config, ExperimentKind::RandomIndex);
  const std::int64_t total = config.replications;
  const int xi = config.spec.num_groups();
  const int dim = config.spec.dim();
  const std::size_t grid_size = config.n_grid.size();
  const std::int64_t n_max = config.n_grid.back();
  constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

  // Running-mean error per (replication, grid point, group), and the
  // distributional statistic W^s = √N(μ̂^s − μ^s) at the largest n.
  std::vector<double> errors(static_cast<std::size_t>(total) * grid_size *
                                 static_cast<std::size_t>(xi),
                             kMissing);
  std::vector<std::optional<Vector>> w_stats(static_cast<std::size_t>(total) *
                                             static_cast<std::size_t>(xi));
  auto error_at = [&](std::int64_t r, std::size_t g, int s) -> double& {
    return errors[(static_cast<std::size_t>(r) * grid_size + g) * static_cast<std::size_t>(xi) +
                  static_cast<std::size_t>(s - 1)];
  };

  parallel_replications(total, options.threads, [&](std::int64_t r) {
    Rng rng(derive_stream_seed(config.base_seed, static_cast<std::uint64_t>(r),
                               static_cast<std::uint64_t>(n_max)));
    const SampleBatch batch = draw_batch(config.spec, config.process, n_max, rng);
    std::vector<Vector> sums(static_cast<std::size_t>(xi), Vector::Zero(dim));
    std::vector<std::int64_t> counts(static_cast<std::size_t>(xi), 0);
    std::size_t g = 0;
    for (std::int64_t i = 1; i <= n_max; ++i) {
      const int s = batch.ss[static_cast<std::size_t>(i - 1)];
      sums[static_cast<std::size_t>(s - 1)] += batch.ys[static_cast<std::size_t>(i - 1)];
      ++counts[static_cast<std::size_t>(s - 1)];
      if (g < grid_size && i == config.n_grid[g]) {
        for (int group = 1; group <= xi; ++group) {
          const std::int64_t count = counts[static_cast<std::size_t>(group - 1)];
          if (count == 0) continue;  // stays missing; discarded per-statistic
          const Vector mean =
              sums[static_cast<std::size_t>(group - 1)] / static_cast<double>(count);
          error_at(r, g, group) =
              (mean - config.spec.group(group).analytic_mean()).norm();
          if (g + 1 == grid_size) {
            const Vector centered = mean - config.spec.group(group).analytic_mean();
            w_stats[static_cast<std::size_t>(r) * static_cast<std::size_t>(xi) +
                    static_cast<std::size_t>(group - 1)] =
                std::sqrt(static_cast<double>(count)) * centered;
          }
        }
        ++g;
      }
    }
  });

  ExperimentResult result;
  result.kind = ExperimentKind::RandomIndex;

  for (std::size_t g = 0; g < grid_size; ++g) {
    ResultRow row;
    row.n = config.n_grid[g];
    row.replications = total;
    row.discarded = 0;
    for (std::int64_t r = 0; r < total; ++r) {
      bool complete = true;
      for (int s = 1; s <= xi; ++s) {
        if (std::isnan(error_at(r, g, s))) complete = false;
      }
      if (!complete) ++row.discarded;
    }
    for (int s = 1; s <= xi; ++s) {
      double sum = 0.0;
      std::int64_t present = 0;
      for (std::int64_t r = 0; r < total; ++r) {
        const double e = error_at(r, g, s);
        if (!std::isnan(e)) {
          sum += e;
          ++present;
        }
      }
      row.stats.emplace_back("mean_running_error_g" + std::to_string(s),
                             present > 0 ? sum / static_cast<double>(present) : 0.0);
    }
    result.rows.push_back(std::move(row));
  }

  // a.s.-convergence mirror: per-replication max error over the tail half of
  // the grid, averaged over replications where the tail is fully observed.
  const std::size_t tail_start = grid_size / 2;
  for (int s = 1; s <= xi; ++s) {
    double sum = 0.0;
    std::int64_t present = 0;
    for (std::int64_t r = 0; r < total; ++r) {
      double worst = 0.0;
      bool complete = true;
      for (std::size_t g = tail_start; g < grid_size; ++g) {
        const double e = error_at(r, g, s);
        if (std::isnan(e)) {
          complete = false;
          break;
        }
        worst = std::max(worst, e);
      }
      if (complete) {
        sum += worst;
        ++present;
      }
    }
    result.summary.emplace_back("tail_max_error_mean_g" + std::to_string(s),
                                present > 0 ? sum / static_cast<double>(present) : 0.0);
  }

  // Distributional mirror at the largest n: mean and variance of W^s.
  for (int s = 1; s <= xi; ++s) {
    Vector mean = Vector::Zero(dim);
    std::int64_t present = 0;
    for (std::int64_t r = 0; r < total; ++r) {
      const auto& w = w_stats[static_cast<std::size_t>(r) * static_cast<std::size_t>(xi) +
                              static_cast<std::size_t>(s - 1)];
      if (w) {
        mean += *w;
        ++present;
      }
    }
    if (present > 0) mean /= static_cast<double>(present);
    Vector var = Vector::Zero(dim);
    for (std::int64_t r = 0; r < total; ++r) {
      const auto& w = w_stats[static_cast<std::size_t>(r) * static_cast<std::size_t>(xi) +
                              static_cast<std::size_t>(s - 1)];
      if (w) {
        const Vector centered = *w - mean;
        var += centered.cwiseProduct(centered);
      }
    }
    if (present > 1) var /= static_cast<double>(present - 1);
    result.summary.emplace_back("w_r_effective_g" + std::to_string(s),
                                static_cast<double>(present));
    for (int c = 0; c < dim; ++c) {
      result.summary.emplace_back(coord_name("w_mean", s, c), mean[c]);
    }
    for (int c = 0; c < dim; ++c) {
      result.summary.emplace_back(coord_name("w_var", s, c), var[c]);
    }
  }
  return result;
}

ExperimentResult run_experiment(const ExperimentConfig& config, const RunOptions& options) {
  switch (config.experiment) {
    case ExperimentKind::Coverage: return run_coverage(config, options);
    case ExperimentKind::Consistency: return run_consistency(config, options);
    case ExperimentKind::Clt: return run_clt(config, options);
    case ExperimentKind::Independence: return run_independence(config, options);
    case ExperimentKind::RandomIndex: return run_random_index(config, options);
  }
  throw InvalidArgument("unknown experiment kind");
}

}  // namespace strata
