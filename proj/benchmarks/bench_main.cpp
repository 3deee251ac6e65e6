#include <vector>

#include <benchmark/benchmark.h>

#include "conproc/iid.hpp"
#include "conproc/phpp.hpp"
#include "conproc/simulate.hpp"
#include "conproc/tree.hpp"

namespace {

using namespace conproc;

void bm_tree_solve(benchmark::State& state) {
    const int horizon = static_cast<int>(state.range(0));
    const ScenarioTree tree = build_binomial(10000.0, 1.02, 1.06, 0.5, horizon);
    PHPPSpec spec;
    spec.steps.assign(static_cast<std::size_t>(horizon),
                      ConditionalExpectationOp{1.0 / 1.02});
    spec.terminal.value = 1.0;
    for (auto _ : state) {
        ConsumptionSolution sol = solve(tree, spec);
        benchmark::DoNotOptimize(sol.x.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(tree.size()));
}
BENCHMARK(bm_tree_solve)->Arg(8)->Arg(12)->Arg(16);

void bm_closed_form_coefficients(benchmark::State& state) {
    ProjectionConstants pc;
    pc.a.assign(static_cast<std::size_t>(state.range(0)), 1.0196078431372548);
    for (auto _ : state) {
        ClosedFormCoefficients coeff = closed_form_coefficients(pc);
        benchmark::DoNotOptimize(coeff.x_over_s.data());
    }
}
BENCHMARK(bm_closed_form_coefficients)->Arg(10)->Arg(100)->Arg(1000);

void bm_simulate_paths(benchmark::State& state) {
    const GrowthModel model{LogNormal{0.02, 0.1}};
    const std::size_t n = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) {
        SimulatedPaths paths = simulate_paths(model, 10000.0, 10, n, 12345);
        benchmark::DoNotOptimize(paths.values.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(n) * 10);
}
BENCHMARK(bm_simulate_paths)->Arg(1000)->Arg(10000);

void bm_inv_norm_cdf(benchmark::State& state) {
    double alpha = 1e-7;
    for (auto _ : state) {
        benchmark::DoNotOptimize(inv_norm_cdf(alpha));
        alpha += 1e-7;
        if (alpha >= 1.0) alpha = 1e-7;
    }
}
BENCHMARK(bm_inv_norm_cdf);

}  // namespace

BENCHMARK_MAIN();
