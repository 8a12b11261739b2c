#include <benchmark/benchmark.h>

#include "vcs/families.hpp"
#include "vcs/jaynes_cummings.hpp"
#include "vcs/moment_audit.hpp"
#include "vcs/susy_rho.hpp"

namespace {

using vcs::Execution;

// Serial reference: one level per integration, no threads.
void BM_AuditSerialReference(benchmark::State& state) {
    const vcs::jc::JCParams p;
    const auto family = vcs::jc::jc_family(p);
    const auto measure = vcs::jc::jc_measure(p);
    const auto max_m = static_cast<std::size_t>(state.range(0));
    for (auto _ : state)
        for (std::size_t m = 0; m <= max_m; ++m)
            benchmark::DoNotOptimize(vcs::audit::audit_moment(family, measure, m, 1e-8));
}

void BM_AuditStacked(benchmark::State& state, Execution exec) {
    const vcs::jc::JCParams p;
    const auto family = vcs::jc::jc_family(p);
    const auto measure = vcs::jc::jc_measure(p);
    const auto max_m = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(vcs::audit::audit_moments(family, measure, max_m, 1e-8, exec));
}

void BM_MonteCarlo(benchmark::State& state, Execution exec) {
    const auto samples = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(vcs::rho::haar_resolution_audit(samples, 2, 7, 8, exec));
}

void BM_Sweep(benchmark::State& state, Execution exec) {
    const vcs::jc::JCParams p;
    std::vector<vcs::jc::SweepPoint> points;
    for (int i = 0; i < state.range(0); ++i) points.push_back({0.1 * i, 1.0, 0.3, -0.2, 0.4});
    vcs::FockTruncation t;
    t.n_components = 2;
    for (auto _ : state) benchmark::DoNotOptimize(vcs::jc::observable_sweep(p, points, t, exec));
}

}  // namespace

BENCHMARK(BM_AuditSerialReference)->Arg(10)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_AuditStacked, serial, Execution::Serial)->Arg(10)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_AuditStacked, parallel, Execution::Parallel)->Arg(10)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_MonteCarlo, serial, Execution::Serial)->Arg(100000)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_MonteCarlo, parallel, Execution::Parallel)->Arg(100000)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Sweep, serial, Execution::Serial)->Arg(31)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Sweep, parallel, Execution::Parallel)->Arg(31)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
