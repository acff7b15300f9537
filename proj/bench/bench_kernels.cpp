// Serial reference path vs OpenMP kernels on a 3-d problem.
#include <benchmark/benchmark.h>

#include "hybridpn/hybrid.hpp"
#include "hybridpn/manufactured.hpp"
#include "hybridpn/transport.hpp"

using namespace hybridpn;

namespace {

ProblemSpec problem() {
    ManufacturedParams p;
    p.eps = 0.5;
    p.dimension = 3;
    p.modes = 5;
    p.band = 8;
    return manufactured("sobolev-s", p).spec;
}

Execution mode(const benchmark::State& state) { return state.range(0) ? Execution::parallel : Execution::serial; }

void BM_SolvePn(benchmark::State& state) {
    const ProblemSpec spec = problem();
    PnOptions opts;
    opts.exec = mode(state);
    for (auto _ : state) benchmark::DoNotOptimize(solve_pn(spec, 7, opts));
}

void BM_Hybrid(benchmark::State& state) {
    ProblemSpec spec = problem();
    spec.M = 4;
    HybridOptions opts;
    opts.exec = mode(state);
    for (auto _ : state) benchmark::DoNotOptimize(run_hybrid(spec, 3, opts));
}

}  // namespace

BENCHMARK(BM_SolvePn)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Hybrid)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
