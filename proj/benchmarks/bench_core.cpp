#include <benchmark/benchmark.h>

#include "hdc/differences.hpp"
#include "hdc/exponent.hpp"
#include "hdc/kernels.hpp"
#include "hdc/moments.hpp"
#include "hdc/recursion.hpp"
#include "hdc/treesim.hpp"

namespace {

void BM_Sequence(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto kernel = hdc::DescentKernel::harmonic();
  for (auto _ : state) benchmark::DoNotOptimize(hdc::evaluate_sequence(kernel, 2, 1.0, n));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Sequence)->RangeMultiplier(2)->Range(1 << 10, 1 << 14)->Complexity(benchmark::oNSquared);

void BM_SequenceBetaKernel(benchmark::State& state) {
  const auto kernel = hdc::DescentKernel::beta(-0.5);
  for (auto _ : state)
    benchmark::DoNotOptimize(hdc::evaluate_sequence(kernel, 2, 1.0, static_cast<std::size_t>(state.range(0))));
}
BENCHMARK(BM_SequenceBetaKernel)->Arg(2000);

void BM_SequenceExact(benchmark::State& state) {
  for (auto _ : state)
    benchmark::DoNotOptimize(hdc::evaluate_sequence_exact(2, hdc::Rational(1), static_cast<std::size_t>(state.range(0))));
}
BENCHMARK(BM_SequenceExact)->Arg(50)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_Differences(benchmark::State& state) {
  for (auto _ : state)
    benchmark::DoNotOptimize(hdc::d_sequence(2, 1.0, static_cast<std::size_t>(state.range(0))));
}
BENCHMARK(BM_Differences)->Arg(1000)->Arg(5000)->Unit(benchmark::kMillisecond);

void BM_Occupation(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(hdc::occupation_vector(static_cast<std::size_t>(state.range(0))));
}
BENCHMARK(BM_Occupation)->Arg(5000)->Unit(benchmark::kMillisecond);

void BM_Residual(benchmark::State& state) {
  const auto t = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(hdc::residual(1.567, t));
}
BENCHMARK(BM_Residual)->Arg(100000)->Arg(10000000)->Unit(benchmark::kMillisecond);

void BM_MomentsCount(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(hdc::dp_moments_count(2, static_cast<std::size_t>(state.range(0))));
}
BENCHMARK(BM_MomentsCount)->Arg(2000)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_SplitSample(benchmark::State& state) {
  const auto m = static_cast<std::size_t>(state.range(0));
  const hdc::SplitSampler sampler(m, hdc::SplitFamily::critical());
  hdc::Rng rng(1);
  for (auto _ : state) benchmark::DoNotOptimize(sampler.sample(m, rng));
}
BENCHMARK(BM_SplitSample)->Arg(16)->Arg(4096)->Arg(1 << 20);

void BM_SimulateDtcs(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const hdc::SplitSampler sampler(n, hdc::SplitFamily::critical());
  hdc::Rng rng(2);
  for (auto _ : state) benchmark::DoNotOptimize(hdc::simulate_dtcs(n, rng, sampler));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SimulateDtcs)->Arg(500)->Arg(3000);

void BM_SimulateShapes(benchmark::State& state) {
  const hdc::SplitSampler sampler(3000, hdc::SplitFamily::critical());
  hdc::Rng rng(3);
  for (auto _ : state) benchmark::DoNotOptimize(hdc::simulate_dtcs(3000, rng, sampler, static_cast<std::size_t>(state.range(0))));
}
BENCHMARK(BM_SimulateShapes)->Arg(4)->Arg(8);

void BM_SimulateLambda(benchmark::State& state) {
  const hdc::SplitSampler sampler(3000, hdc::SplitFamily::critical());
  hdc::Rng rng(4);
  for (auto _ : state) benchmark::DoNotOptimize(hdc::simulate_lambda(3000, rng, sampler));
}
BENCHMARK(BM_SimulateLambda);

}  // namespace

BENCHMARK_MAIN();
