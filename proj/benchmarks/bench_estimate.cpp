#include <benchmark/benchmark.h>

#include "casefit/estimate.hpp"
#include "casefit/rng.hpp"
#include "casefit/sampling.hpp"

namespace {

using casefit::CounterRng;
using casefit::Index;
using casefit::Matrix;
using casefit::Parameter;
using casefit::Vector;

void BM_FitLinear(benchmark::State& state) {
  const Index n = state.range(0);
  Matrix design(n, 2);
  for (Index i = 0; i < n; ++i) {
    design(i, 0) = 1.0;
    design(i, 1) = static_cast<double>(i + 1);
  }
  CounterRng rng(4, 0);
  Vector x_obs = design * Vector{{1.0, 0.5}} + rng.normal_vector(n);
  for (auto _ : state) {
    auto est = casefit::fit_linear(design, x_obs);
    benchmark::DoNotOptimize(est.sse);
  }
}
BENCHMARK(BM_FitLinear)->Arg(10)->Arg(100)->Arg(1000);

void BM_FitExpDecay(benchmark::State& state) {
  auto model = casefit::make_expdecay(casefit::default_design("expdecay"));
  CounterRng rng(5, 0);
  Vector x_obs =
      casefit::evaluate(model, Parameter{2.0, 0.7}) + 0.01 * rng.normal_vector(model.n());
  for (auto _ : state) {
    auto est = casefit::fit_nonlinear(model, x_obs, Parameter{1.0, 0.3});
    benchmark::DoNotOptimize(est.sse);
  }
}
BENCHMARK(BM_FitExpDecay);

void BM_MonteCarloLinear(benchmark::State& state) {
  casefit::RandomVariableModel rv{casefit::make_linear(casefit::default_design("linear")),
                                  Parameter{1.0, 0.5}, 1.0, 42};
  const auto replicates = static_cast<std::uint64_t>(state.range(0));
  for (auto _ : state) {
    auto report = casefit::monte_carlo_study(rv, replicates, 0.05);
    benchmark::DoNotOptimize(report.coverage);
  }
}
BENCHMARK(BM_MonteCarloLinear)->Arg(1000)->Arg(10000);

}  // namespace
