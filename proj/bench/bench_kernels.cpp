#include <benchmark/benchmark.h>

#include "shearlab/diagnostics.hpp"
#include "shearlab/dynamics.hpp"
#include "shearlab/initial_data.hpp"

using namespace shearlab;

namespace {

// state.range(0): grid nx (ny = 2 nx); state.range(1): 0 serial, 1 parallel.
struct Setup {
    Exec saved;
    GridPtr grid;
    InitialData data;
    explicit Setup(const benchmark::State& st)
        : saved(default_exec()),
          grid(make_grid(static_cast<int>(st.range(0)), 2 * static_cast<int>(st.range(0)), 16.0 * 3.14159265358979)),
          data(make_initial_data(grid, 1, 1e-3, 1e-4, 6.0)) {
        set_default_exec(st.range(1) ? Exec::parallel : Exec::serial);
    }
    ~Setup() { set_default_exec(saved); }
};

void exec_args(benchmark::internal::Benchmark* b) {
    for (int n : {64, 128, 256})
        for (int p : {0, 1}) b->Args({n, p});
    b->ArgNames({"nx", "parallel"});
}

void BM_ToPhysical(benchmark::State& st) {
    Setup s(st);
    for (auto _ : st) benchmark::DoNotOptimize(transform_to_physical(s.data.omega));
}

void BM_DealiasedProduct(benchmark::State& st) {
    Setup s(st);
    for (auto _ : st) benchmark::DoNotOptimize(dealiased_product(s.data.omega, s.data.theta));
}

void BM_L2Norm(benchmark::State& st) {
    Setup s(st);
    for (auto _ : st) benchmark::DoNotOptimize(l2_norm(s.data.omega));
}

void BM_Velocity(benchmark::State& st) {
    Setup s(st);
    for (auto _ : st) benchmark::DoNotOptimize(velocity_from_vorticity(s.data.omega));
}

void BM_StepFull(benchmark::State& st) {
    Setup s(st);
    const SimState s0 = make_state(s.data.omega, s.data.theta, SystemTag::full);
    const PhysicsParams phys{1e-3, 1e-3, false};
    for (auto _ : st) benchmark::DoNotOptimize(step_full(s0, phys, 0.01));
}

void BM_MultiplierTable(benchmark::State& st) {
    Setup s(st);
    static const MultiplierParams p = make_multiplier_params(1e-2, 2.0 / 3.0);
    const Exec e = st.range(1) ? Exec::parallel : Exec::serial;
    for (auto _ : st) benchmark::DoNotOptimize(MultiplierTable(p, s.grid, 3.0, true, e));
}

}  // namespace

BENCHMARK(BM_ToPhysical)->Apply(exec_args);
BENCHMARK(BM_DealiasedProduct)->Apply(exec_args);
BENCHMARK(BM_L2Norm)->Apply(exec_args);
BENCHMARK(BM_Velocity)->Apply(exec_args);
BENCHMARK(BM_StepFull)->Apply(exec_args)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MultiplierTable)->Apply(exec_args)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
