#include <benchmark/benchmark.h>

#include "vfem/rng.hpp"
#include "vfem/routing.hpp"
#include "vfem/sim.hpp"
#include "vfem/vforce.hpp"

namespace {

vfem::NetworkConfig config_for(int nodes, int annuli) {
    vfem::NetworkConfig c;
    c.node_count = nodes;
    c.annulus_count = annuli;
    return vfem::finalize(c);
}

void BM_Relax(benchmark::State& state) {
    const auto c = config_for(static_cast<int>(state.range(0)), 4);
    vfem::Rng rng(1, vfem::Stream::Deployment);
    const auto init = vfem::uniform_disk(rng, c.node_count, c.radius);
    for (auto _ : state) benchmark::DoNotOptimize(vfem::relax(init, c));
}
BENCHMARK(BM_Relax)->Arg(103)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_SelectPaths(benchmark::State& state) {
    const int k = static_cast<int>(state.range(0));
    const auto c = config_for(k == 4 ? 103 : 200, k);
    const auto d = vfem::deploy(c);
    for (auto _ : state) benchmark::DoNotOptimize(vfem::select_paths(d.network, d.plan));
}
BENCHMARK(BM_SelectPaths)->Arg(4)->Arg(5)->Unit(benchmark::kMicrosecond);

void BM_RunRound(benchmark::State& state) {
    const auto c = config_for(103, 4);
    const auto d = vfem::deploy(c);
    vfem::SimState sim(d.network, d.plan.k);
    auto routing = vfem::select_paths(sim.nodes, d.plan);
    for (auto _ : state) {
        // Refill so the network never dies during long benchmark runs.
        if (sim.round % 10000 == 9999)
            for (auto& n : sim.nodes) n.residual = c.initial_energy;
        benchmark::DoNotOptimize(vfem::run_round(sim, routing, d.plan, c));
    }
}
BENCHMARK(BM_RunRound)->Unit(benchmark::kMicrosecond);

}  // namespace
BENCHMARK_MAIN();
