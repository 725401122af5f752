#include <benchmark/benchmark.h>

#include <memory>
#include <vector>

#include "superdiff/billiard.hpp"
#include "superdiff/normalizers.hpp"
#include "superdiff/rng.hpp"
#include "superdiff/sources.hpp"

using namespace superdiff;

static void BM_PhiloxWords(benchmark::State& state) {
  RngStream rng(1, 0);
  for (auto _ : state) benchmark::DoNotOptimize(rng.next_u64());
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_PhiloxWords);

static void BM_ParetoSource(benchmark::State& state) {
  sources::SourceSpec spec;
  spec.seed = 2;
  sources::Source src(spec, 0);
  std::vector<Vec2> buf(4096);
  for (auto _ : state) {
    src.fill(buf);
    benchmark::DoNotOptimize(buf.data());
  }
  state.SetItemsProcessed(state.iterations() * buf.size());
}
BENCHMARK(BM_ParetoSource);

static void BM_Collide(benchmark::State& state) {
  const double rho = static_cast<double>(state.range(0)) / 100.0;
  const auto table = billiard::build_table({{{0.5, 0.5}, rho}}, 2);
  auto x = billiard::sample_invariant(table, 3, 1).front();
  for (auto _ : state) {
    const auto out = billiard::collide(table, x);
    benchmark::DoNotOptimize(out);
    x = out.next;
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_Collide)->Arg(10)->Arg(25)->Arg(45);

static void BM_LorentzSource(benchmark::State& state) {
  sources::SourceSpec spec;
  spec.kind = sources::SourceKind::Lorentz;
  spec.seed = 4;
  spec.table = std::make_shared<const billiard::BilliardTable>(billiard::build_table({{{0.5, 0.5}, 0.25}}, 2));
  sources::Source src(spec, 0);
  std::vector<Vec2> buf(4096);
  for (auto _ : state) {
    src.fill(buf);
    benchmark::DoNotOptimize(buf.data());
  }
  state.SetItemsProcessed(state.iterations() * buf.size());
}
BENCHMARK(BM_LorentzSource);

static void BM_CStar(benchmark::State& state) {
  double n = 1e6;
  for (auto _ : state) {
    benchmark::DoNotOptimize(normalizers::c_star(n, 1.0));
    n += 1.0;
  }
}
BENCHMARK(BM_CStar);
BENCHMARK_MAIN();
