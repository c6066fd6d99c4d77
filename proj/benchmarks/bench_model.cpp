#include <benchmark/benchmark.h>

#include "s2spm/model.hpp"
#include "s2spm/sgraph.hpp"
#include "s2spm/train.hpp"

namespace {

s2spm::SignedGraph planted(int n) {
    s2spm::PlantedConfig cfg;
    cfg.n_nodes = n;
    cfg.k = 4;
    cfg.seed = 3;
    return s2spm::generate_planted(cfg).graph;
}

void bm_full_nll(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const s2spm::SignedGraph g = planted(n);
    s2spm::TrainConfig cfg;
    cfg.k_pos = 4;
    cfg.k_neg = 4;
    const s2spm::ModelParams p = s2spm::init_params(g, cfg);
    for (auto _ : state) {
        benchmark::DoNotOptimize(s2spm::full_nll(p, g, n * (n - 1) / 2));
    }
    state.SetItemsProcessed(state.iterations() * (n * (n - 1) / 2));
}
BENCHMARK(bm_full_nll)->Arg(20)->Arg(40)->Arg(60);

void bm_derive_state(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const s2spm::SignedGraph g = planted(n);
    s2spm::TrainConfig cfg;
    cfg.k_pos = 8;
    cfg.k_neg = 8;
    const s2spm::ModelParams p = s2spm::init_params(g, cfg);
    for (auto _ : state) {
        benchmark::DoNotOptimize(s2spm::derive(p));
    }
}
BENCHMARK(bm_derive_state)->Arg(100)->Arg(400);

void bm_fit_iteration(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const s2spm::SignedGraph g = planted(n);
    s2spm::TrainConfig cfg;
    cfg.k_pos = 4;
    cfg.k_neg = 4;
    cfg.iterations = 1;
    cfg.checkpoint_every = 1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(s2spm::fit(g, cfg));
    }
}
BENCHMARK(bm_fit_iteration)->Arg(50)->Arg(150)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
