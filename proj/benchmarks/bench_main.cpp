#include <benchmark/benchmark.h>

#include "relayguard/gossip.hpp"
#include "relayguard/harness.hpp"
#include "relayguard/labeler.hpp"
#include "relayguard/monitor.hpp"
#include "relayguard/overlay.hpp"
#include "relayguard/stats.hpp"

using namespace relayguard;

namespace {

const Trace& bench_trace() {
    static const Trace t = [] {
        SyntheticProfile p;
        p.n_transactions = 20000;
        p.n_senders = 800;
        p.duration_s = 660;
        return generate_synthetic(p);
    }();
    return t;
}

void BM_GenerateTrace(benchmark::State& state) {
    SyntheticProfile p;
    p.n_transactions = static_cast<std::uint64_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(generate_synthetic(p));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_GenerateTrace)->Arg(10000)->Arg(50000)->Unit(benchmark::kMillisecond);

void BM_LabelTrace(benchmark::State& state) {
    const auto& t = bench_trace();
    for (auto _ : state) benchmark::DoNotOptimize(label_trace(t, compute_dataset_stats(t)));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(t.size()));
}
BENCHMARK(BM_LabelTrace)->Unit(benchmark::kMillisecond);

void BM_MonitorProcess(benchmark::State& state) {
    const auto& t = bench_trace();
    for (auto _ : state) {
        BehaviorMonitor m;
        for (const auto& tx : t.transactions) benchmark::DoNotOptimize(m.process(tx));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(t.size()));
}
BENCHMARK(BM_MonitorProcess)->Unit(benchmark::kMillisecond);

void BM_RollingQuantilePush(benchmark::State& state) {
    RollingQuantile q(static_cast<std::size_t>(state.range(0)));
    Rng rng(1);
    for (auto _ : state) {
        q.push(static_cast<double>(rng() % 1000));
        benchmark::DoNotOptimize(q.quantile(25));
    }
}
BENCHMARK(BM_RollingQuantilePush)->Arg(100)->Arg(1000);

void BM_ReplayOurs(benchmark::State& state) {
    const auto& t = bench_trace();
    const auto labels = label_trace(t, compute_dataset_stats(t));
    const ExperimentSettings s;
    for (auto _ : state) benchmark::DoNotOptimize(run_replay(t, labels, PolicyKind::Ours, s, 1));
}
BENCHMARK(BM_ReplayOurs)->Unit(benchmark::kMillisecond);

void BM_BuildOverlay(benchmark::State& state) {
    std::uint64_t seed = 0;
    for (auto _ : state) benchmark::DoNotOptimize(build_overlay(static_cast<std::size_t>(state.range(0)), 8, ++seed));
}
BENCHMARK(BM_BuildOverlay)->Arg(100)->Arg(1000)->Unit(benchmark::kMicrosecond);

void BM_PropagateNaive(benchmark::State& state) {
    const auto g = build_overlay(static_cast<std::size_t>(state.range(0)), 8, 1);
    const NaiveRelay relay;
    Rng rng(2);
    Transaction tx;
    for (auto _ : state) benchmark::DoNotOptimize(propagate(g, tx, false, 0, relay, rng));
}
BENCHMARK(BM_PropagateNaive)->Arg(100)->Arg(1000);

void BM_PropagateModerate(benchmark::State& state) {
    const auto g = build_overlay(100, 8, 1);
    const ReputationRelay relay({}, {}, [](std::size_t, const std::string&) { return 0.5; });
    Rng rng(2);
    Transaction tx;
    for (auto _ : state) benchmark::DoNotOptimize(propagate(g, tx, false, 0, relay, rng));
}
BENCHMARK(BM_PropagateModerate);

}  // namespace

BENCHMARK_MAIN();
