#include "benchmark/benchmark.h"
#include "strata/membership.hpp"
#include "strata/population.hpp"
#include "strata/rng.hpp"

namespace {

strata::PopulationSpec bivariate_population() {
  strata::Vector m1(2), m2(2);
  m1 << 0.0, 0.0;
  m2 << 0.25, 0.25;
  strata::Matrix s1(2, 2), s2(2, 2);
  s1 << 1.0, 0.2, 0.2, 0.8;
  s2 << 1.5, -0.3, -0.3, 1.2;
  return strata::PopulationSpec({0.5, 0.5}, {strata::GroupDistribution::gaussian(m1, s1),
                                             strata::GroupDistribution::gaussian(m2, s2)});
}

void BM_GaussianSample(benchmark::State& state) {
  const auto spec = bivariate_population();
  strata::Rng rng(1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(spec.group(1).sample(rng));
  }
}
BENCHMARK(BM_GaussianSample);

void BM_GenerateMemberships(benchmark::State& state) {
  const auto process = strata::MembershipProcess::iid({0.5, 0.5});
  strata::Rng rng(2);
  const auto n = state.range(0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(process.generate(n, rng));
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_GenerateMemberships)->Arg(1000)->Arg(10000);

void BM_DrawBatch(benchmark::State& state) {
  const auto spec = bivariate_population();
  const auto process = strata::MembershipProcess::iid({0.5, 0.5});
  strata::Rng rng(3);
  const auto n = state.range(0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(strata::draw_batch(spec, process, n, rng));
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_DrawBatch)->Arg(1000)->Arg(10000);

}  // namespace
