#include <benchmark/benchmark.h>

#include <vector>

#include "martapprox/inner.hpp"
#include "martapprox/linear_process.hpp"
#include "martapprox/prop2.hpp"
#include "martapprox/prop3.hpp"
#include "martapprox/series.hpp"

using namespace martapprox;

static void BM_SingularCoeffs(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(singular_inner_coeffs(1.0, n));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_SingularCoeffs)->RangeMultiplier(10)->Range(1000, 1000000)->Complexity();

static void BM_ExpSeries(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto g = singular_exponent_coeffs(1.0, n);
  for (auto _ : state) benchmark::DoNotOptimize(exp_series(g, n));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ExpSeries)->RangeMultiplier(2)->Range(64, 2048)->Complexity();

static void BM_BlaschkeProduct(benchmark::State& state) {
  const auto spec = BlaschkeSpec::dyadic(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(blaschke_product_coeffs(spec, 100000, [](std::string_view) {}));
}
BENCHMARK(BM_BlaschkeProduct)->Arg(8)->Arg(16)->Arg(32);

static void BM_BestScalarGap(benchmark::State& state) {
  const auto s = singular_inner_coeffs(1.0, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(best_scalar_gap(s, state.range(0)));
}
BENCHMARK(BM_BestScalarGap)->Arg(1000)->Arg(10000)->Arg(100000);

static void BM_SimulatePath(benchmark::State& state) {
  const LinearProcessSpec spec(singular_inner_coeffs(1.0, 1000), Innovation::normal, 1);
  std::uint64_t rep = 0;
  for (auto _ : state) benchmark::DoNotOptimize(simulate_path(spec, state.range(0), 1000, rep++));
}
BENCHMARK(BM_SimulatePath)->Arg(1000)->Arg(10000);

static void BM_DecodeNatural(benchmark::State& state) {
  const auto P = synthesize_params(inv_sqrt_log_bound(), static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(simulate_and_decode(P, 1000, 1));
}
BENCHMARK(BM_DecodeNatural)->Arg(4)->Arg(8)->Arg(16);

static void BM_DecodeUniformExtended(benchmark::State& state) {
  const auto P = synthesize_params(inv_sqrt_log_bound(), static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(simulate_and_decode(P, 100, 1, OccupancyLaw::uniform));
}
BENCHMARK(BM_DecodeUniformExtended)->Arg(8)->Arg(16);

static void BM_MdNorms(benchmark::State& state) {
  const auto m = ExactModel::standard(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(md_norms(m));
}
BENCHMARK(BM_MdNorms)->DenseRange(2, 6, 2);

static void BM_DecodeG(benchmark::State& state) {
  std::vector<int> s(20, 1);
  for (std::size_t i = 0; i < s.size(); i += 3) s[i] = -1;
  const double g = encode_g(s);
  for (auto _ : state) benchmark::DoNotOptimize(decode_g(g, 10));
}
BENCHMARK(BM_DecodeG);

BENCHMARK_MAIN();
