#include <benchmark/benchmark.h>

#include "hiter/halpern.hpp"
#include "hiter/rates.hpp"
#include "hiter/util/exactexp.hpp"
#include "hiter/util/rng.hpp"

using namespace hiter;

namespace {

std::pair<Point, Point> sample_pair(const GeodesicSpace& space) {
  Rng rng(42);
  Point a = space.random_point(rng);
  Point b = space.random_point(rng);
  return {a, b};
}

void BM_dist(benchmark::State& state, const std::string& descriptor) {
  const SpacePtr space = make_space(descriptor);
  const auto [a, b] = sample_pair(*space);
  for (auto _ : state) benchmark::DoNotOptimize(space->dist(a, b));
}

void BM_combine(benchmark::State& state, const std::string& descriptor) {
  const SpacePtr space = make_space(descriptor);
  const auto [a, b] = sample_pair(*space);
  for (auto _ : state) benchmark::DoNotOptimize(space->combine(a, b, 0.375));
}

void BM_trajectory(benchmark::State& state) {
  HalpernConfig cfg;
  cfg.space = make_space("euclidean:ball:4:1");
  cfg.T = make_map(cfg.space, "compose(rotation:1:8,project:1/2)");
  Rng rng(7);
  cfg.u = cfg.space->random_point(rng);
  cfg.x = cfg.space->random_point(rng);
  cfg.schedule = make_schedule("harmonic");
  cfg.horizon = state.range(0);
  cfg.store_points = false;
  for (auto _ : state) benchmark::DoNotOptimize(halpern_run(cfg));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_tower_row(benchmark::State& state) {
  const Counterexample g = parse_counterexample("g:affine:2:3");
  const Int k(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(meta_harmonic_row(Rat(1, 2), g, Int(2), k));
}

void BM_meta_harmonic_budgeted(benchmark::State& state) {
  const Counterexample g = parse_counterexample("g:affine:2:3");
  MetaBudget budget;
  budget.max_value_bits = state.range(0);
  for (auto _ : state)
    benchmark::DoNotOptimize(meta_harmonic(Rat(1, 2), g, Int(2), budget));
}

void BM_asreg_harmonic(benchmark::State& state) {
  for (auto _ : state)
    benchmark::DoNotOptimize(asreg_rate_harmonic(Rat(1, 10), Int(2)));
}

void BM_browder(benchmark::State& state) {
  const Counterexample g = parse_counterexample("g:affine:1:1");
  for (auto _ : state)
    benchmark::DoNotOptimize(browder_K(Rat(1, 4), g, Int(2)));
}

void BM_ceil_exp(benchmark::State& state) {
  const Int k(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(ceil_exp(k));
}

}  // namespace

BENCHMARK_CAPTURE(BM_dist, euclidean2, "euclidean:ball:2:1");
BENCHMARK_CAPTURE(BM_dist, euclidean8, "euclidean:ball:8:1");
BENCHMARK_CAPTURE(BM_dist, tripod, "tree:tripod");
BENCHMARK_CAPTURE(BM_dist, disk, "disk:1");
BENCHMARK_CAPTURE(BM_combine, euclidean2, "euclidean:ball:2:1");
BENCHMARK_CAPTURE(BM_combine, euclidean8, "euclidean:ball:8:1");
BENCHMARK_CAPTURE(BM_combine, tripod, "tree:tripod");
BENCHMARK_CAPTURE(BM_combine, disk, "disk:1");
BENCHMARK(BM_trajectory)->Arg(1'000)->Arg(10'000);
BENCHMARK(BM_tower_row)->Arg(0)->Arg(3);
BENCHMARK(BM_meta_harmonic_budgeted)->Arg(1'024)->Arg(4'096);
BENCHMARK(BM_asreg_harmonic);
BENCHMARK(BM_browder);
BENCHMARK(BM_ceil_exp)->Arg(10)->Arg(100)->Arg(1'000);

BENCHMARK_MAIN();
