#include <benchmark/benchmark.h>

#include <cstar/algebra.hpp>
#include <cstar/fullness.hpp>
#include <cstar/ksearch.hpp>
#include <cstar/orthogonality.hpp>
#include <cstar/tower.hpp>

namespace {

using namespace cstar;

ComplexMatrix random_positive(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  ComplexMatrix g = ginibre(n, n, rng);
  return g * g.adjoint() + 0.1 * identity_matrix(n);
}

void BM_OperatorNorm(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::mt19937_64 rng(11);
  ComplexMatrix x = ginibre(n, n, rng);
  for (auto _ : state) benchmark::DoNotOptimize(operator_norm(x));
}
BENCHMARK(BM_OperatorNorm)->Arg(16)->Arg(64)->Arg(216);

void BM_ConditionalExpectation(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  auto emb = left_factor_embedding(m, m);
  ExpectationOperator expectation(emb);
  ComplexMatrix a = random_positive(m * m, 23);
  for (auto _ : state) benchmark::DoNotOptimize(expectation.apply(a));
}
BENCHMARK(BM_ConditionalExpectation)->Arg(4)->Arg(8)->Arg(14);

void BM_CommutantBasis(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  auto emb = left_factor_embedding(m, m);
  for (auto _ : state) benchmark::DoNotOptimize(commutant(emb));
}
BENCHMARK(BM_CommutantBasis)->Arg(4)->Arg(8);

void BM_CertificateFromExpectation(benchmark::State& state) {
  auto emb = left_factor_embedding(3, 4);
  ComplexMatrix a = random_positive(12, 37);
  for (auto _ : state)
    benchmark::DoNotOptimize(certificate_from_expectation(a, emb, 0.5, 7));
}
BENCHMARK(BM_CertificateFromExpectation);

void BM_IntertwinerConstruct(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const int k = static_cast<int>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(intertwiner_construct(d, k));
}
BENCHMARK(BM_IntertwinerConstruct)->Args({3, 4})->Args({4, 5})->Args({9, 16});

void BM_MinRankMargin(benchmark::State& state) {
  auto iw = intertwiner_construct(3, 4);
  SphereSearchOptions opts;
  opts.grid_points = 512;
  opts.starts = 2;
  opts.iters = 40;
  for (auto _ : state)
    benchmark::DoNotOptimize(min_rank_margin(iw.u, 3, 4, opts));
}
BENCHMARK(BM_MinRankMargin);

void BM_BuildTower(benchmark::State& state) {
  for (auto _ : state)
    benchmark::DoNotOptimize(build_uhf_tower({2, 2}, {6, 6}, 2));
}
BENCHMARK(BM_BuildTower);

void BM_RegularityCheck(benchmark::State& state) {
  Tower t = build_uhf_tower({2, 2}, {6, 6}, 2);
  for (auto _ : state) benchmark::DoNotOptimize(regularity_check(t, 1, 2));
}
BENCHMARK(BM_RegularityCheck);

void BM_SearchUnitary(benchmark::State& state) {
  SearchOptions opts;
  opts.starts = 2;
  opts.iters = 15;
  opts.budget = 8000;
  for (auto _ : state) benchmark::DoNotOptimize(search_unitary(2, 2, opts));
}
BENCHMARK(BM_SearchUnitary);

}  // namespace

BENCHMARK_MAIN();
