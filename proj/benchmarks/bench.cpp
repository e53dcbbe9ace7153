#include <benchmark/benchmark.h>

#include "qcflow/catalog.hpp"
#include "qcflow/chart.hpp"
#include "qcflow/flow.hpp"
#include "qcflow/seminorms.hpp"

using namespace qcflow;

namespace {

void BM_FlowRotation(benchmark::State& state) {
    auto f = load_catalog_field("rotation2d");
    FlowMap F{f};
    Vec x0(2);
    x0 << 1.0, 0.0;
    const double t = static_cast<double>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(flow(F, x0, t));
}
BENCHMARK(BM_FlowRotation)->Arg(1)->Arg(4)->Arg(16);

void BM_FlowJacobian(benchmark::State& state) {
    auto f = load_catalog_field("xloga");
    FlowMap F{f};
    Vec x0(2);
    x0 << 0.8, -0.3;
    for (auto _ : state) benchmark::DoNotOptimize(flow_jacobian(F, x0, 0.5));
}
BENCHMARK(BM_FlowJacobian);

void BM_SeminormQ(benchmark::State& state) {
    auto f = load_catalog_field("xloga");
    SamplingConfig cfg;
    cfg.base_points = static_cast<int>(state.range(0));
    cfg.direction_pairs = 2 * cfg.base_points;
    for (auto _ : state) benchmark::DoNotOptimize(estimate_q(f, cfg));
}
BENCHMARK(BM_SeminormQ)->Arg(25)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_ChartForward(benchmark::State& state) {
    auto E = load_catalog_plane("graph-parabola3d");
    auto C = build_chart(E, Vec::Zero(3));
    Vec x(3);
    x << 0.5 * C.eps, -0.4 * C.eps, 0.2 * C.eps;
    for (auto _ : state) benchmark::DoNotOptimize(chart_forward(C, x));
}
BENCHMARK(BM_ChartForward);

void BM_InvolutivityResidual(benchmark::State& state) {
    auto E = load_catalog_plane("contact3d");
    auto grid = make_grid(DomainBox::cube(3, 1.0), static_cast<int>(state.range(0)));
    for (auto _ : state)
        benchmark::DoNotOptimize(involutivity_residual(E, grid, 1e-5));
}
BENCHMARK(BM_InvolutivityResidual)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
