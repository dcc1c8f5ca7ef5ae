#include "splitting/algebra.hpp"
#include "splitting/catalog.hpp"
#include "splitting/engine.hpp"
#include "splitting/oscillatory.hpp"
#include "splitting/problems.hpp"
#include "splitting/stability.hpp"

#include <benchmark/benchmark.h>

using namespace splitting;

namespace {

// 50x50 two-part matrix problem, as in the appendix experiments
void BM_MatrixRun(benchmark::State& st, const char* id) {
    const auto mp = random_matrix_problem(50, 2, 1);
    const auto sp = to_split_problem(mp);
    const State x0 = State::Identity(50, 50);
    const auto& s = builtin(id);
    for (auto _ : st) benchmark::DoNotOptimize(run(s, sp, 0.1, x0, 100).final_state.data());
    st.SetItemsProcessed(st.iterations() * 100);
}
BENCHMARK_CAPTURE(BM_MatrixRun, strang, "strang-aba")->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_MatrixRun, triplejump4, "triplejump-4")->Unit(benchmark::kMillisecond);

void BM_SchrodingerStep(benchmark::State& st) {
    SchrodingerGrid g;
    g.M = static_cast<std::size_t>(st.range(0));
    const auto P = schrodinger_problem(g, double_well_potential());
    const auto& s = builtin("strang-aba");
    State u = P.initial_state();
    for (auto _ : st) {
        u = step(s, P.split, 0.01, u);
        benchmark::DoNotOptimize(u.data());
    }
    st.SetComplexityN(st.range(0));
}
BENCHMARK(BM_SchrodingerStep)->RangeMultiplier(2)->Range(128, 2048)->Complexity(benchmark::oNLogN);

void BM_PendulumRun(benchmark::State& st, const char* id) {
    const auto p = pendulum_problem(PendulumSplit::TV);
    const State x0 = pendulum_state(0.1, 0.0);
    const auto& s = builtin(id);
    for (auto _ : st) benchmark::DoNotOptimize(run(s, p, 5.0 / 12, x0, 1200).final_state.data());
}
BENCHMARK_CAPTURE(BM_PendulumRun, strang, "strang-aba");
BENCHMARK_CAPTURE(BM_PendulumRun, hmc3, "hmc-3stage");

// order-condition evaluation on the 125-stage quintuple jump
void BM_MultiIndexReport(benchmark::State& st) {
    const auto& k = builtin("quintuplejump-8").coeffs;
    for (auto _ : st) benchmark::DoNotOptimize(multiindex_report(k, static_cast<int>(st.range(0))).order);
}
BENCHMARK(BM_MultiIndexReport)->DenseRange(5, 9, 2)->Unit(benchmark::kMillisecond);

void BM_LyndonWords(benchmark::State& st) {
    for (auto _ : st) benchmark::DoNotOptimize(lyndon_words(static_cast<int>(st.range(0))).size());
}
BENCHMARK(BM_LyndonWords)->DenseRange(8, 14, 3);

void BM_StabilityInterval(benchmark::State& st) {
    const auto& s = builtin("triplejump-4");
    for (auto _ : st) benchmark::DoNotOptimize(stability_interval(s, 10.0));
}
BENCHMARK(BM_StabilityInterval);

void BM_ProcessedStrang(benchmark::State& st) {
    const auto sys = pendulum_system();
    for (auto _ : st) benchmark::DoNotOptimize(run_oscillatory_experiment(sys, processed_strang(4, 1.0, 5.0 / 6), 5.0 / 6, 500).max_error);
}
BENCHMARK(BM_ProcessedStrang)->Unit(benchmark::kMillisecond);

} // namespace
BENCHMARK_MAIN();
