#include "benchmark/benchmark.h"
#include "strata/chi_square.hpp"
#include "strata/estimation.hpp"
#include "strata/montecarlo.hpp"

namespace {

strata::PopulationSpec bench_population() {
  strata::Vector m1(2), m2(2);
  m1 << 0.0, 0.0;
  m2 << 0.25, 0.25;
  strata::Matrix s1(2, 2), s2(2, 2);
  s1 << 1.0, 0.2, 0.2, 0.8;
  s2 << 1.5, -0.3, -0.3, 1.2;
  return strata::PopulationSpec({0.5, 0.5}, {strata::GroupDistribution::gaussian(m1, s1),
                                             strata::GroupDistribution::gaussian(m2, s2)});
}

void BM_MakeReport(benchmark::State& state) {
  const auto spec = bench_population();
  const auto process = strata::MembershipProcess::iid({0.5, 0.5});
  strata::Rng rng(4);
  const auto batch = strata::draw_batch(spec, process, state.range(0), rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        strata::make_report(batch, strata::WeightScheme::Empirical, spec, rng));
  }
}
BENCHMARK(BM_MakeReport)->Arg(1000)->Arg(10000);

void BM_WaldRegion(benchmark::State& state) {
  const auto spec = bench_population();
  const auto process = strata::MembershipProcess::iid({0.5, 0.5});
  strata::Rng rng(5);
  const auto batch = strata::draw_batch(spec, process, 2000, rng);
  const auto report = strata::make_report(batch, strata::WeightScheme::Empirical, spec, rng);
  const strata::Vector target = strata::true_mean(spec);
  for (auto _ : state) {
    benchmark::DoNotOptimize(strata::region_contains(report, target, 0.05));
  }
}
BENCHMARK(BM_WaldRegion);

void BM_ChiSquareQuantile(benchmark::State& state) {
  double p = 0.90;
  for (auto _ : state) {
    p = p == 0.90 ? 0.95 : 0.90;
    benchmark::DoNotOptimize(strata::chi_square_quantile(p, state.range(0)));
  }
}
BENCHMARK(BM_ChiSquareQuantile)->Arg(1)->Arg(2)->Arg(10);

void BM_CoverageReplicationLoop(benchmark::State& state) {
  strata::ExperimentConfig config{bench_population(),
                                  strata::MembershipProcess::iid({0.5, 0.5}),
                                  strata::WeightScheme::Empirical,
                                  {500},
                                  100,
                                  0.05,
                                  42,
                                  strata::ExperimentKind::Coverage};
  strata::RunOptions options;
  options.threads = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(strata::run_coverage(config, options));
  }
}
BENCHMARK(BM_CoverageReplicationLoop)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace
