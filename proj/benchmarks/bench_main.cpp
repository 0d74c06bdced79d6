#include <benchmark/benchmark.h>

#include "rtv/batchsim.hpp"
#include "rtv/generators.hpp"
#include "rtv/lp.hpp"
#include "rtv/mip.hpp"
#include "rtv/rounding.hpp"
#include "rtv/routing.hpp"
#include "rtv/tripgen.hpp"

using namespace rtv;

namespace {

Instance routing_instance(int requests) {
  RandomInstanceParams p;
  p.n_requests = requests;
  p.n_vehicles = 1;
  p.capacity = 8;
  p.max_wait = 3600;
  p.max_delay = 3600;
  p.seed = 12;
  return gen_random(p);
}

void BM_ExactRoute(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Instance inst = routing_instance(n);
  std::vector<int> ids;
  for (int i = 0; i < n; ++i) ids.push_back(i);
  const Trip t = Trip::of(ids);
  for (auto _ : state)
    benchmark::DoNotOptimize(exact_cost(t, inst.vehicles[0], inst));
}
BENCHMARK(BM_ExactRoute)->Arg(2)->Arg(4)->Arg(6)->Arg(8);

void BM_GapFamilyLp(benchmark::State& state) {
  Instance gap = gen_gap_family(static_cast<int>(state.range(0)));
  const StandardFormLP lp = build_lp(*gap.trips, gap);
  for (auto _ : state) benchmark::DoNotOptimize(solve_lp(lp));
}
BENCHMARK(BM_GapFamilyLp)->Arg(4)->Arg(8);

void BM_RandomPenaltyLp(benchmark::State& state) {
  RandomInstanceParams p;
  p.n_requests = static_cast<int>(state.range(0));
  p.n_vehicles = 8;
  p.capacity = 2;
  p.seed = 5;
  Instance inst = add_dummies(gen_random(p));
  const TripCatalog cat = generate_catalog(inst, {});
  const StandardFormLP lp = build_lp(cat, inst);
  for (auto _ : state) benchmark::DoNotOptimize(solve_lp(lp));
}
BENCHMARK(BM_RandomPenaltyLp)->Arg(20)->Arg(40);

void BM_RandomPenaltyIlp(benchmark::State& state) {
  RandomInstanceParams p;
  p.n_requests = static_cast<int>(state.range(0));
  p.n_vehicles = 6;
  p.capacity = 2;
  p.seed = 6;
  Instance inst = add_dummies(gen_random(p));
  const TripCatalog cat = generate_catalog(inst, {});
  const StandardFormLP lp = build_lp(cat, inst);
  for (auto _ : state) benchmark::DoNotOptimize(solve_ilp(lp));
}
BENCHMARK(BM_RandomPenaltyIlp)->Arg(15)->Arg(30);

void BM_CatalogGeneration(benchmark::State& state) {
  RandomInstanceParams p;
  p.n_requests = static_cast<int>(state.range(0));
  p.n_vehicles = 10;
  p.capacity = 2;
  p.seed = 7;
  const Instance inst = gen_random(p);
  for (auto _ : state) benchmark::DoNotOptimize(generate_catalog(inst, {}));
}
BENCHMARK(BM_CatalogGeneration)->Arg(20)->Arg(50);

void BM_DependentRounding(benchmark::State& state) {
  const TightnessFamily fam = gen_tightness_family(4);
  const TripCatalog& cat = *fam.instance.trips;
  std::uint64_t seed = 0;
  for (auto _ : state)
    benchmark::DoNotOptimize(round_dependent(fam.x, cat, seed++));
}
BENCHMARK(BM_DependentRounding);

}  // namespace

BENCHMARK_MAIN();
