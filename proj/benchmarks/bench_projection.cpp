#include <benchmark/benchmark.h>

#include "casefit/projection.hpp"
#include "casefit/rng.hpp"

namespace {

using casefit::CounterRng;
using casefit::Index;
using casefit::Matrix;
using casefit::Vector;

Matrix random_matrix(CounterRng& rng, Index rows, Index cols) {
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = rng.next_normal();
  return m;
}

void BM_ProjectSubspace(benchmark::State& state) {
  const Index n = state.range(0);
  const Index k = state.range(1);
  CounterRng rng(1, 0);
  auto basis = casefit::SubspaceBasis::from_columns(random_matrix(rng, n, k));
  Vector point = random_matrix(rng, n, 1);
  for (auto _ : state) {
    auto res = casefit::project_subspace(basis, point);
    benchmark::DoNotOptimize(res.projection);
  }
}
BENCHMARK(BM_ProjectSubspace)->Args({10, 2})->Args({100, 5})->Args({1000, 10});

void BM_SplitBasis(benchmark::State& state) {
  const Index n = state.range(0);
  CounterRng rng(2, 0);
  auto basis = casefit::SubspaceBasis::from_columns(random_matrix(rng, n, 3));
  for (auto _ : state) {
    auto split = casefit::split_basis(basis);
    benchmark::DoNotOptimize(split.tangent_onb);
  }
}
BENCHMARK(BM_SplitBasis)->Arg(10)->Arg(100)->Arg(500);

void BM_GeneralizedInverse(benchmark::State& state) {
  const Index n = state.range(0);
  CounterRng rng(3, 0);
  Matrix a = random_matrix(rng, n, n / 2);
  for (auto _ : state) {
    Matrix pinv = casefit::generalized_inverse(a);
    benchmark::DoNotOptimize(pinv);
  }
}
BENCHMARK(BM_GeneralizedInverse)->Arg(10)->Arg(50)->Arg(200);

}  // namespace
