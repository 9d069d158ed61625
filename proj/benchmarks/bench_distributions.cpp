#include <benchmark/benchmark.h>

#include "casefit/distributions.hpp"
#include "casefit/rng.hpp"

namespace {

void BM_Chi2Cdf(benchmark::State& state) {
  double x = 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(casefit::chi2_cdf(8, x));
    x = x < 40.0 ? x + 0.1 : 0.1;
  }
}
BENCHMARK(BM_Chi2Cdf);

void BM_FQuantile(benchmark::State& state) {
  double p = 0.01;
  for (auto _ : state) {
    benchmark::DoNotOptimize(casefit::f_quantile(2, 8, p));
    p = p < 0.99 ? p + 0.01 : 0.01;
  }
}
BENCHMARK(BM_FQuantile);

void BM_NormalDraws(benchmark::State& state) {
  casefit::CounterRng rng(6, 0);
  for (auto _ : state) benchmark::DoNotOptimize(rng.next_normal());
}
BENCHMARK(BM_NormalDraws);

}  // namespace
