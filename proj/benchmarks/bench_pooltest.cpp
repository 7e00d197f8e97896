#include "poolmax/backtest.hpp"
#include "poolmax/pooltest.hpp"
#include "poolmax/simlab.hpp"
#include "poolmax/subsets.hpp"

#include <benchmark/benchmark.h>

using namespace poolmax;

namespace {

DataMatrix panel(std::size_t n, std::size_t p) {
    simlab::DgpSpec s;
    s.model = simlab::Model::B1;
    s.n = n;
    s.p = p;
    s.p0 = p / 5;
    return simlab::generate(s, RngSpec{1, 0});
}

void BM_PooledPanel(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const DataMatrix x = panel(n, 100);
    const SubsetFamily fam = build_family(100, 49, 200, RngSpec{2, 0});
    for (auto _ : state) benchmark::DoNotOptimize(pooled_panel(x, fam));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_PooledPanel)->Arg(500)->Arg(3000);

// Replicates per second of the multiplier bootstrap.
void BM_Bootstrap(benchmark::State& state) {
    const auto threads = static_cast<unsigned>(state.range(0));
    const PooledPanel pp = pooled_panel(panel(500, 100), build_family(100, 49, 200, RngSpec{2, 0}));
    BootstrapConfig cfg;
    cfg.replicates = 1000;
    cfg.threads = threads;
    for (auto _ : state) benchmark::DoNotOptimize(multiplier_bootstrap(pp, cfg));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(cfg.replicates));
}
BENCHMARK(BM_Bootstrap)->Arg(1)->Arg(4)->UseRealTime();

void BM_PoolTest(benchmark::State& state) {
    const DataMatrix x = panel(500, 100);
    const SubsetFamily fam = build_family(100, 49, 200, RngSpec{2, 0});
    BootstrapConfig cfg;
    cfg.replicates = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(pool_test(x, fam, 0.05, cfg));
}
BENCHMARK(BM_PoolTest)->Arg(500)->Arg(1000);

void BM_TailDependence(benchmark::State& state) {
    const DataMatrix z = panel(3000, static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(backtest::tail_dependence(z, 0.01));
}
BENCHMARK(BM_TailDependence)->Arg(50)->Arg(200);

}  // namespace

BENCHMARK_MAIN();
