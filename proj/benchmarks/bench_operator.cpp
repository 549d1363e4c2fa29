#include <benchmark/benchmark.h>

#include <memory>

#include "nfsim/model.hpp"
#include "nfsim/operator.hpp"
#include "nfsim/solver.hpp"

using namespace nfsim;

namespace {

const KernelSpec& mexican_hat() {
    static const KernelSpec k = preset("ex1-case1-mu45-nodelay").kernel;
    return k;
}

void BM_DenseApply(benchmark::State& state) {
    auto grid = std::make_shared<const Grid>(Domain{0.6}, static_cast<std::size_t>(state.range(0)));
    const ConnectivityOperator op = assemble_dense(grid, mexican_hat());
    const std::vector<double> s = default_probe(*grid);
    std::vector<double> out(grid->size());
    for (auto _ : state) {
        op.apply(s, out);
        benchmark::DoNotOptimize(out.data());
    }
    state.counters["points"] = static_cast<double>(grid->size());
}
BENCHMARK(BM_DenseApply)->Arg(16)->Arg(24)->Arg(32)->Arg(48)->Unit(benchmark::kMicrosecond);

void BM_LowRankApply(benchmark::State& state) {
    auto grid = std::make_shared<const Grid>(Domain{0.6}, static_cast<std::size_t>(state.range(0)));
    const ConnectivityOperator op = assemble_low_rank(grid, mexican_hat(), static_cast<std::size_t>(state.range(1)));
    const std::vector<double> s = default_probe(*grid);
    std::vector<double> out(grid->size());
    for (auto _ : state) {
        op.apply(s, out);
        benchmark::DoNotOptimize(out.data());
    }
}
BENCHMARK(BM_LowRankApply)->Args({16, 12})->Args({24, 12})->Args({32, 12})->Args({48, 12})->Unit(benchmark::kMicrosecond);

// One implicit step; the stepper advances across iterations, which is fine
// for timing since the per-step work does not depend on t.
void step_bench(benchmark::State& state, const char* id) {
    Scenario sc = preset(id);
    sc.n_per_dim = static_cast<std::size_t>(state.range(0));
    if (sc.rank > sc.n_per_dim) sc.rank = 0;
    sc.t_final = 1e6 * sc.h_t;
    const DiscreteProblem p = discretize(sc);
    SolverOptions o;
    o.continue_on_no_convergence = true;
    ImplicitStepper st(p, o);
    int iterations = 0;
    for (auto _ : state) iterations += st.step().iterations;
    state.counters["picard"] = benchmark::Counter(iterations, benchmark::Counter::kAvgIterations);
}

void BM_StepHexagonalNoDelay(benchmark::State& state) { step_bench(state, "ex2-nodelay"); }
BENCHMARK(BM_StepHexagonalNoDelay)->Arg(16)->Arg(32)->Arg(48)->Unit(benchmark::kMillisecond);

void BM_StepHexagonalDelayed(benchmark::State& state) { step_bench(state, "ex2-v10"); }
BENCHMARK(BM_StepHexagonalDelayed)->Arg(16)->Arg(32)->Arg(48)->Unit(benchmark::kMillisecond);

void BM_StepMexicanHatDelayed(benchmark::State& state) { step_bench(state, "ex1-case1-mu45-v1"); }
BENCHMARK(BM_StepMexicanHatDelayed)->Arg(48)->Unit(benchmark::kMillisecond);

void BM_Assembly(benchmark::State& state) {
    auto grid = std::make_shared<const Grid>(Domain{0.6}, 48);
    for (auto _ : state) {
        if (state.range(0) == 0) {
            benchmark::DoNotOptimize(assemble_dense(grid, mexican_hat()).size());
        } else {
            benchmark::DoNotOptimize(assemble_low_rank(grid, mexican_hat(), 12).size());
        }
    }
}
BENCHMARK(BM_Assembly)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
