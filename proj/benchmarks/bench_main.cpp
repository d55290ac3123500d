#include <benchmark/benchmark.h>

#include <cmath>

#include "slowns/solver1d.hpp"
#include "slowns/solver2d.hpp"

using namespace slowns;

static void BM_SpectralDerivative(benchmark::State& st) {
    const GridX g(std::size_t(st.range(0)));
    Field1D f(g);
    for (std::size_t i = 0; i < g.n; ++i) f[i] = std::sin(6.283185307179586 * g.node(i));
    for (auto _ : st) benchmark::DoNotOptimize(ddx(f));
}
BENCHMARK(BM_SpectralDerivative)->Arg(256)->Arg(1024);

static void BM_LimitStep(benchmark::State& st) {
    FluidParams p;
    SolverConfig cfg;
    const auto spec = make_initial_data(DataFamily::gaussian_bump, 0.3, 1.0);
    State1D s = State1D::from_spec(spec, GridX(std::size_t(st.range(0))), 0.0);
    LimitStepper step(p, cfg);
    for (auto _ : st) step.step(s, cfg.dt);
}
BENCHMARK(BM_LimitStep)->Arg(256);

static void BM_Step2D(benchmark::State& st) {
    FluidParams p;
    SolverConfig cfg;
    const auto spec = make_initial_data(DataFamily::gaussian_bump, 0.3, 1.0);
    const GridY slab(32, 5.0);
    const GridY gy = default_grid_y_2d(slab, 0.2);
    State2D s = slow_embed(spec, EpsScaling(0.2), GridX(std::size_t(st.range(0))), gy, slab);
    Stepper2D step(p, cfg);
    for (auto _ : st) step.step(s, cfg.dt);
    st.counters["ny"] = double(gy.n);
}
BENCHMARK(BM_Step2D)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
