#include "sft/harness.hpp"
#include "sft/linf_reduce.hpp"
#include "sft/recovery.hpp"

#include <benchmark/benchmark.h>

using namespace sft;

static void BM_Forward(benchmark::State& state) {
    const Universe u(state.range(0), state.range(1));
    const TensorDft dft(u);
    Rng rng(1);
    Signal x(u);
    for (auto& v : x.values) v = {rng.normal(), rng.normal()};
    for (auto _ : state) benchmark::DoNotOptimize(dft.forward(x));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(u.n()));
}
BENCHMARK(BM_Forward)->Args({16, 3})->Args({2, 12})->Args({6, 4})->Args({3, 7})->Args({1024, 1})->Args({64, 2});

static void BM_SparseEvalTime(benchmark::State& state) {
    const Universe u(16, 3);
    Rng rng(2);
    SparseApprox y(u);
    while (y.size() < static_cast<std::size_t>(state.range(0))) y.set(rng.below(u.n()), {rng.normal(), 1.0});
    std::vector<std::size_t> pts(64);
    for (auto& t : pts) t = rng.below(u.n());
    for (auto _ : state) benchmark::DoNotOptimize(sparse_eval_time(y, pts));
}
BENCHMARK(BM_SparseEvalTime)->Arg(8)->Arg(64);

static void BM_LinfinityReduce(benchmark::State& state) {
    SignalSpec spec;
    spec.k = 8;
    spec.sigma = sigma_for_ratio(4096, 8, 1.0, 256);
    const GeneratedSignal g = gen_signal(spec);
    const Universe u = g.x.universe;
    const std::size_t reps = static_cast<std::size_t>(state.range(0));
    const SampleBundle bundle(u, 1, reps, 64, 3);
    const auto pts = bundle.all_points();
    const auto rounds = measure_bundle(AuditedSignal(g.x, pts), bundle);
    const TensorDft dft(u);
    const SparseApprox y(u);
    const ReduceOptions opts{state.range(1) != 0, false};
    for (auto _ : state) benchmark::DoNotOptimize(linfinity_reduce({y, rounds[0], 0.5}, dft, opts));
}
BENCHMARK(BM_LinfinityReduce)->Args({48, 0})->Args({48, 1})->Unit(benchmark::kMillisecond);

static void BM_Recovery(benchmark::State& state) {
    ExperimentConfig cfg;
    cfg.signal.k = state.range(0);
    cfg.signal.sigma = sigma_for_ratio(4096, cfg.signal.k, 1.0, static_cast<double>(state.range(1)));
    cfg.algorithm = state.range(2) ? Algorithm::warmup : Algorithm::main;
    std::uint64_t seed = 0;
    for (auto _ : state) {
        cfg.signal.seed = ++seed;
        benchmark::DoNotOptimize(run_experiment(cfg));
    }
}
BENCHMARK(BM_Recovery)
    ->Args({8, 256, 0})
    ->Args({8, 65536, 0})
    ->Args({4, 256, 1})
    ->Unit(benchmark::kMillisecond)
    ->Iterations(5);

BENCHMARK_MAIN();
