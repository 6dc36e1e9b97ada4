#include <benchmark/benchmark.h>

#include "oflm/covariance.hpp"
#include "oflm/kernels.hpp"
#include "oflm/limits.hpp"
#include "oflm/simulate.hpp"

using namespace oflm;

namespace {

Mat mat2(double a, double b, double c, double d) {
    Mat m(2, 2);
    m << a, b, c, d;
    return m;
}

TimeKernelParams ma_p2() {
    return TimeKernelParams::general(make_hurst(mat2(0.7, 0.1, -0.05, 0.35)), mat2(1.0, 0.2, 0.3, 0.9),
                                                                     mat2(0.4, 0.0, -0.2, 0.5));
}

LevyMeasure atoms_p2() {
    return LevyMeasure::discrete({{(Vec(2) << 1.0, 0.5).finished(), 0.7}, {(Vec(2) << -0.3, 2.0).finished(), 0.4}});
}

}  // namespace

static void TimeKernel_P2(benchmark::State& state) {
    const auto params = ma_p2();
    double s = -3.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(time_kernel(1.0, s, params));
        s = s > 3.0 ? -3.0 : s + 0.01;
    }
}
BENCHMARK(TimeKernel_P2);

static void FourierKernel_P2(benchmark::State& state) {
    const CMat A = mat2(1.0, 0.3, -0.2, 0.8).cast<cplx>();
    const auto fp = FourierKernelParams::make(make_hurst(mat2(0.7, 0.1, -0.05, 0.35)), A);
    double x = 0.01;
    for (auto _ : state) {
        benchmark::DoNotOptimize(fourier_kernel(1.0, x, fp));
        x = x > 50.0 ? 0.01 : x * 1.01;
    }
}
BENCHMARK(FourierKernel_P2);

static void CovMa_P2(benchmark::State& state) {
    const auto params = ma_p2();
    const auto mu = atoms_p2();
    for (auto _ : state) benchmark::DoNotOptimize(cov_maofLm(0.8, 1.5, params, mu));
}
BENCHMARK(CovMa_P2)->Unit(benchmark::kMillisecond);

static void Parseval_P1(benchmark::State& state) {
    const auto params = TimeKernelParams::general(make_hurst(Mat::Constant(1, 1, 0.7)), Mat::Ones(1, 1),
                                                                                                Mat::Zero(1, 1));
    for (auto _ : state) benchmark::DoNotOptimize(parseval_residual(1.0, 2.0, params));
}
BENCHMARK(Parseval_P1)->Unit(benchmark::kMillisecond);

// one path on a grid of state.range(0) points
static void MaPath_P2(benchmark::State& state) {
    std::vector<double> grid;
    for (int k = 1; k <= state.range(0); ++k) grid.push_back(k / static_cast<double>(state.range(0)));
    const MaSimulator sim(ma_p2(), atoms_p2(), grid);
    Rng rng(1, 0);
    for (auto _ : state) benchmark::DoNotOptimize(sim.path(rng));
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(MaPath_P2)->Arg(4)->Arg(64)->Arg(256)->Unit(benchmark::kMicrosecond);

static void LocalLimitChf(benchmark::State& state) {
    const MaModel model{TimeKernelParams::general(make_hurst(Mat::Constant(1, 1, 0.4)), Mat::Ones(1, 1),
                                                                                                Mat::Zero(1, 1)),
                                            LevyMeasure::tempered(Mat::Constant(1, 1, 0.75),
                                                                                        {{Vec::Ones(1), 0.5, {}}, {-Vec::Ones(1), 0.5, {}}}, 1e-3, true)};
    for (auto _ : state) benchmark::DoNotOptimize(opstable_limit_chf({1.0}, {Vec::Constant(1, 0.35)}, model));
}
BENCHMARK(LocalLimitChf)->Unit(benchmark::kMillisecond);

/*
1 core, g++ 11.4, Release build

Benchmark                 Time             CPU   Iterations
-----------------------------------------------------------
TimeKernel_P2           597 ns          582 ns       119711
FourierKernel_P2        324 ns          322 ns       160832
CovMa_P2               2.70 ms         2.69 ms           36
Parseval_P1            2.55 ms         2.55 ms           28
MaPath_P2/4            87.4 us         85.9 us          992 items_per_second=11.6383k/s
MaPath_P2/64           1498 us         1496 us           50 items_per_second=668.395/s
MaPath_P2/256          6264 us         6262 us           10 items_per_second=159.703/s
LocalLimitChf          3.53 ms         3.45 ms           19
*/
