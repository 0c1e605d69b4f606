// Microbenchmarks: graph sampling (geometric-skip vs per-pair coupled), HC
// evaluation, exact tail numerics, and the Monte Carlo power loop.

#include <cstdint>

#include <benchmark/benchmark.h>

#include "betascan/binomial.hpp"
#include "betascan/detectors.hpp"
#include "betascan/graph_model.hpp"
#include "betascan/lr_oracle.hpp"
#include "betascan/simlab.hpp"
#include "betascan/theory.hpp"

namespace {

using namespace betascan;

void BM_sample_fast(benchmark::State& state) {
    const ModelParams params{state.range(0), 25.0};
    const SignalSpec signal = make_signal_from_alpha(params, 0.55, 0.8);
    std::uint64_t seed = 1;
    for (auto _ : state) {
        const GraphSample g = sample_graph(params, signal, seed++, false);
        benchmark::DoNotOptimize(g.degrees.data());
    }
}
BENCHMARK(BM_sample_fast)->Arg(100)->Arg(1000)->Arg(10000);

void BM_sample_coupled(benchmark::State& state) {
    const ModelParams params{state.range(0), 25.0};
    const SignalSpec signal = make_signal_from_alpha(params, 0.55, 0.8);
    std::uint64_t seed = 1;
    for (auto _ : state) {
        const GraphSample g = sample_graph_coupled(params, signal, seed++,
                                                   false);
        benchmark::DoNotOptimize(g.degrees.data());
    }
}
BENCHMARK(BM_sample_coupled)->Arg(100)->Arg(1000);

void BM_hc_curve(benchmark::State& state) {
    const ModelParams params{state.range(0), 25.0};
    const std::vector<NullHcMoments> table = null_hc_table(params);
    const GraphSample g = sample_graph(params, null_signal(), 7, false);
    for (auto _ : state)
        benchmark::DoNotOptimize(hc_stat(hc_curve(g, params, table)));
}
BENCHMARK(BM_hc_curve)->Arg(100)->Arg(1000);

void BM_null_hc_table(benchmark::State& state) {
    const ModelParams params{state.range(0), 25.0};
    for (auto _ : state)
        benchmark::DoNotOptimize(null_hc_table(params).size());
}
BENCHMARK(BM_null_hc_table)->Arg(100)->Arg(1000);

void BM_upper_tail_deep(benchmark::State& state) {
    const BinomialLaw law{1000000, 1e-4};
    for (auto _ : state)
        benchmark::DoNotOptimize(upper_tail(law, 200.0, true));
}
BENCHMARK(BM_upper_tail_deep);

void BM_sum_upper_tail_convolution(benchmark::State& state) {
    const std::int64_t trials = state.range(0);
    const BinomialSumLaw law{{{trials, 0.01}, {trials, 0.02}}};
    const double threshold = 0.04 * static_cast<double>(trials);
    for (auto _ : state)
        benchmark::DoNotOptimize(sum_upper_tail(law, threshold, true));
}
BENCHMARK(BM_sum_upper_tail_convolution)->Arg(1000)->Arg(5000);

void BM_second_moment_formula(benchmark::State& state) {
    const std::int64_t n = state.range(0);
    for (auto _ : state)
        benchmark::DoNotOptimize(second_moment_formula(n, 30, 0.5, 25.0).value);
}
BENCHMARK(BM_second_moment_formula)->Arg(1000)->Arg(10000);

void BM_estimate_power(benchmark::State& state) {
    const ModelParams params{100, 25.0};
    const SignalSpec signal = make_signal_from_alpha(params, 0.55, 0.8);
    std::uint64_t seed = 1;
    for (auto _ : state) {
        const PowerEstimate est = estimate_power(
            TestId::higher_criticism, params, signal, 2.0, 50, seed++, 1);
        benchmark::DoNotOptimize(est.power);
    }
}
BENCHMARK(BM_estimate_power);

} // namespace

BENCHMARK_MAIN();
