// Microbenchmarks for the per-observation and per-query costs of each
// estimator, plus the exact-oracle bookkeeping they are measured against.

#include <benchmark/benchmark.h>

#include <cmath>
#include <cstddef>
#include <vector>

#include "streamq/data_aligned.hpp"
#include "streamq/equispaced.hpp"
#include "streamq/interpolated.hpp"
#include "streamq/oracle.hpp"
#include "streamq/p2.hpp"
#include "streamq/reservoir.hpp"
#include "streamq/rng.hpp"

namespace {

constexpr std::size_t kDataSize = std::size_t{1} << 16;
constexpr std::size_t kDataMask = kDataSize - 1;

const std::vector<double>& lognormal_values() {
    static const std::vector<double> values = [] {
        streamq::rng r(20250611);
        std::vector<double> v(kDataSize);
        for (auto& x : v) {
            x = 10.0 * std::exp(0.8 * r.gaussian());
        }
        return v;
    }();
    return values;
}

template <typename Estimator>
void run_observe(benchmark::State& state, Estimator& est) {
    const auto& data = lognormal_values();
    std::size_t i = 0;
    for (auto _ : state) {
        est.observe(data[i]);
        i = (i + 1) & kDataMask;
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()));
}

template <typename Estimator>
void run_query(benchmark::State& state, Estimator& est, double q) {
    const auto& data = lognormal_values();
    for (const double d : data) {
        est.observe(d);
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(est.query(q));
    }
}

void bm_aligned_observe(benchmark::State& state) {
    streamq::data_aligned_estimator est(static_cast<std::size_t>(state.range(0)));
    run_observe(state, est);
}
BENCHMARK(bm_aligned_observe)->Arg(12)->Arg(50)->Arg(500);

void bm_interpolated_observe(benchmark::State& state) {
    streamq::interpolated_estimator est(static_cast<std::size_t>(state.range(0)));
    run_observe(state, est);
}
BENCHMARK(bm_interpolated_observe)->Arg(12)->Arg(50)->Arg(500);

void bm_equispaced_observe(benchmark::State& state) {
    streamq::equispaced_estimator est(static_cast<std::size_t>(state.range(0)));
    run_observe(state, est);
}
BENCHMARK(bm_equispaced_observe)->Arg(50)->Arg(500);

void bm_reservoir_observe(benchmark::State& state) {
    streamq::reservoir_estimator est(static_cast<std::size_t>(state.range(0)), 42);
    run_observe(state, est);
}
BENCHMARK(bm_reservoir_observe)->Arg(50)->Arg(500);

void bm_p2_observe(benchmark::State& state) {
    streamq::p2_estimator est(0.95);
    run_observe(state, est);
}
BENCHMARK(bm_p2_observe);

void bm_aligned_query(benchmark::State& state) {
    streamq::data_aligned_estimator est(static_cast<std::size_t>(state.range(0)));
    run_query(state, est, 0.95);
}
BENCHMARK(bm_aligned_query)->Arg(50)->Arg(500);

void bm_interpolated_query(benchmark::State& state) {
    streamq::interpolated_estimator est(static_cast<std::size_t>(state.range(0)));
    run_query(state, est, 0.95);
}
BENCHMARK(bm_interpolated_query)->Arg(50)->Arg(500);

void bm_reservoir_query(benchmark::State& state) {
    streamq::reservoir_estimator est(static_cast<std::size_t>(state.range(0)), 42);
    run_query(state, est, 0.95);
}
BENCHMARK(bm_reservoir_query)->Arg(500);

void bm_oracle_insert(benchmark::State& state) {
    const auto& data = lognormal_values();
    streamq::exact_oracle oracle;
    std::size_t i = 0;
    for (auto _ : state) {
        oracle.observe(data[i]);
        i = (i + 1) & kDataMask;
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()));
}
BENCHMARK(bm_oracle_insert);

void bm_oracle_query(benchmark::State& state) {
    const auto& data = lognormal_values();
    streamq::exact_oracle oracle;
    for (const double d : data) {
        oracle.observe(d);
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(oracle.quantile(0.95));
    }
}
BENCHMARK(bm_oracle_query);

} // namespace

BENCHMARK_MAIN();
