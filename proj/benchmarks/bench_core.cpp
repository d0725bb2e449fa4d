#include <benchmark/benchmark.h>

#include <cstdint>
#include <vector>

#include "credence/estimator.hpp"
#include "credence/harness.hpp"
#include "credence/lyapunov.hpp"
#include "credence/meanfield.hpp"
#include "credence/model.hpp"
#include "credence/types.hpp"

namespace {

using credence::UnreliabilityVector;

UnreliabilityVector make_pi(std::size_t n) {
  std::vector<double> pi(n);
  for (std::size_t i = 0; i < n; ++i)
    pi[i] = 0.05 + 0.4 * static_cast<double>(i) / static_cast<double>(n);
  return UnreliabilityVector{std::move(pi)};
}

UnreliabilityVector make_x(std::size_t n) {
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i)
    x[i] = 0.2 + 0.6 * static_cast<double>(i + 1) / static_cast<double>(n + 1);
  return UnreliabilityVector{std::move(x)};
}

void BM_VerdictProb(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  const UnreliabilityVector x = make_x(n);
  const credence::VerdictVector r(n, 1);
  for (auto _ : state) benchmark::DoNotOptimize(credence::verdict_prob(r, x));
}
BENCHMARK(BM_VerdictProb)->Arg(3)->Arg(8)->Arg(16);

void BM_SoftUpdate(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  const UnreliabilityVector x = make_x(n);
  credence::VerdictVector r(n, 1);
  for (std::size_t i = 0; i + 1 < n; i += 2) r[i] = -1;
  for (auto _ : state) benchmark::DoNotOptimize(credence::soft_update(r, x));
}
BENCHMARK(BM_SoftUpdate)->Arg(3)->Arg(8)->Arg(16);

void BM_MeanField(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  const UnreliabilityVector x = make_x(n);
  const UnreliabilityVector pi = make_pi(n);
  for (auto _ : state) benchmark::DoNotOptimize(credence::mean_field(x, pi));
}
BENCHMARK(BM_MeanField)->Arg(3)->Arg(8)->Arg(12);

void BM_LyapunovValue(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  const UnreliabilityVector x = make_x(n);
  const UnreliabilityVector pi = make_pi(n);
  for (auto _ : state) benchmark::DoNotOptimize(credence::lyapunov_value(x, pi));
}
BENCHMARK(BM_LyapunovValue)->Arg(3)->Arg(8)->Arg(12);

void BM_EstimatorStep(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  const UnreliabilityVector pi = make_pi(n);
  const credence::StreamSampler sampler(pi, 7);
  credence::EstimatorState s = credence::EstimatorState::make(
      credence::ExperimentConfig::default_reset_point(n),
      credence::StepSchedule::harmonic(), credence::TruncationFamily{},
      credence::ExperimentConfig::default_reset_point(n));
  std::int64_t t = 0;
  for (auto _ : state) {
    credence::step_truncated(s, sampler.sample(t++).r);
    benchmark::DoNotOptimize(s.p);
  }
}
BENCHMARK(BM_EstimatorStep)->Arg(3)->Arg(8)->Arg(16);

void BM_StreamSample(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  const credence::StreamSampler sampler(make_pi(n), 7);
  std::int64_t t = 0;
  for (auto _ : state) benchmark::DoNotOptimize(sampler.sample(t++));
}
BENCHMARK(BM_StreamSample)->Arg(3)->Arg(16);

void BM_DecoderExact(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  const UnreliabilityVector pi = make_pi(n);
  const std::vector<double> alpha = credence::optimal_weights(pi.values());
  for (auto _ : state)
    benchmark::DoNotOptimize(credence::decoder_error_exact(pi.values(), alpha, 0.0));
}
BENCHMARK(BM_DecoderExact)->Arg(4)->Arg(12);

}  // namespace

BENCHMARK_MAIN();
