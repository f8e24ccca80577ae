#include <benchmark/benchmark.h>

#include "mlsg/hamnash.hpp"
#include "mlsg/model.hpp"
#include "mlsg/riccati.hpp"
#include "mlsg/sim.hpp"
#include "mlsg/strategies.hpp"

using namespace mlsg;

namespace {

const ModelParams& params() {
    static const ModelParams p = baseline_params();
    return p;
}

void BM_KConstants(benchmark::State& state) {
    double t = 0.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(k_constants(params(), t));
        t = t < 0.999 ? t + 0.001 : 0.0;
    }
}
BENCHMARK(BM_KConstants);

void BM_PhiPsi(benchmark::State& state) {
    double t = 0.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(phi_psi(params(), t));
        t = t < 0.999 ? t + 0.001 : 0.0;
    }
}
BENCHMARK(BM_PhiPsi);

void BM_RiccatiSolve(benchmark::State& state) {
    const TimeMesh mesh{1.0, static_cast<int>(state.range(0))};
    for (auto _ : state) benchmark::DoNotOptimize(solve_riccati(params(), mesh));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_RiccatiSolve)->Arg(1000)->Arg(10000)->Complexity(benchmark::oN);

void BM_LeaderNash(benchmark::State& state) {
    const HamiltonianPoint pt{0.5, 1.0, 0.1, -0.2, 0.01, 0.02};
    for (auto _ : state) benchmark::DoNotOptimize(leader_nash_numeric(params(), pt));
}
BENCHMARK(BM_LeaderNash);

void BM_StrategyEvaluation(benchmark::State& state) {
    static const RiccatiSolution sol = solve_riccati(params(), TimeMesh{1.0, 10000});
    static const StrategyCoefficients coeffs = strategy_coefficients(params(), sol);
    double t = 0.0, x = 0.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(evaluate_strategies(coeffs, t, x));
        t = t < 0.999 ? t + 0.0007 : 0.0;
        x = x < 9.9 ? x + 0.013 : 0.0;
    }
}
BENCHMARK(BM_StrategyEvaluation);

void BM_Simulate(benchmark::State& state) {
    static const RiccatiSolution sol = solve_riccati(params(), TimeMesh{1.0, 10000});
    static const StrategyCoefficients coeffs = strategy_coefficients(params(), sol);
    SimConfig cfg;
    cfg.n_paths = state.range(0);
    cfg.n_steps = 200;
    cfg.seed = 42;
    cfg.x0 = 1.0;
    for (auto _ : state) benchmark::DoNotOptimize(simulate(params(), coeffs, cfg));
    state.SetItemsProcessed(state.iterations() * cfg.n_paths * cfg.n_steps);
}
BENCHMARK(BM_Simulate)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
