#include <benchmark/benchmark.h>

#include "s2spm/skellam.hpp"

namespace {

// The four evaluation regimes of the log Bessel routine: ascending series,
// scaled asymptotic, ratio climbing from a large argument, and the continued
// fraction fallback for large order at moderate argument.

void bm_log_bessel_series(benchmark::State& state) {
    for (auto _ : state) {
        benchmark::DoNotOptimize(s2spm::log_bessel_i(3, 12.5));
    }
}
BENCHMARK(bm_log_bessel_series);

void bm_log_bessel_asymptotic(benchmark::State& state) {
    for (auto _ : state) {
        benchmark::DoNotOptimize(s2spm::log_bessel_i(4, 250.0));
    }
}
BENCHMARK(bm_log_bessel_asymptotic);

void bm_log_bessel_ratio_climb(benchmark::State& state) {
    for (auto _ : state) {
        benchmark::DoNotOptimize(s2spm::log_bessel_i(40, 1600.0));
    }
}
BENCHMARK(bm_log_bessel_ratio_climb);

void bm_log_bessel_continued_fraction(benchmark::State& state) {
    for (auto _ : state) {
        benchmark::DoNotOptimize(s2spm::log_bessel_i(60, 40.0));
    }
}
BENCHMARK(bm_log_bessel_continued_fraction);

void bm_skellam_log_pmf(benchmark::State& state) {
    const long y = state.range(0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(s2spm::skellam_log_pmf(y, 1.7, 0.6));
    }
}
BENCHMARK(bm_skellam_log_pmf)->Arg(0)->Arg(3)->Arg(25);

void bm_skellam_nll_grad(benchmark::State& state) {
    const long y = state.range(0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(s2spm::skellam_nll_grad(y, 1.7, 0.6));
    }
}
BENCHMARK(bm_skellam_nll_grad)->Arg(0)->Arg(3)->Arg(25);

}  // namespace
