#include <benchmark/benchmark.h>

#include <random>

#include "twt/control.hpp"
#include "twt/scenario.hpp"
#include "twt/simkit.hpp"

using namespace twt;

namespace {

plant::PlantParams params() {
    plant::PlantParams p;
    p.machine = machine::MachineParams::from_dq(0.5, 0.2, 3, 8e-3, 4e-3, 1e-3, 0.5, 0.01);
    return p;
}

plant::PlantState state() {
    sim::Scenario sc = scenario::default_config().scenario;
    return sim::operating_point(sc, 0.05);
}

machine::FaultSpec fault() {
    machine::FaultSpec f;
    f.severity = 0.2;
    f.turbine = 1;
    f.onset_time = 0.0;
    return f;
}

void BM_FullDerivative(benchmark::State& bench) {
    const plant::PlantParams p = params();
    const plant::PlantState x = state();
    const aero::WindSample wind{10.0, 0.0, 0.0, 0.0, 0.0, 0.0};
    const plant::PlantInput u{0.01, {5.0, -2.0, -3.0}, {1.0, 1.0, -2.0}};
    for (auto _ : bench) {
        auto dx = plant::full_derivative(x, u, 1.0, fault(), wind, p);
        benchmark::DoNotOptimize(dx);
    }
}
BENCHMARK(BM_FullDerivative);

void BM_ActiveControl(benchmark::State& bench) {
    const plant::PlantParams p = params();
    const plant::PlantState x = state();
    const aero::WindSample wind{10.0, 0.0, 0.0, 0.0, 0.0, 0.0};
    const control::References refs;
    const control::ControllerGains gains;
    for (auto _ : bench) {
        auto u = control::active_control(x, 1.0, fault(), wind, refs, gains, p);
        benchmark::DoNotOptimize(u);
    }
}
BENCHMARK(BM_ActiveControl);

void BM_PassiveControl(benchmark::State& bench) {
    const plant::PlantParams p = params();
    const plant::PlantState x = state();
    const aero::WindSample wind{10.0, 0.0, 0.0, 0.0, 0.0, 0.0};
    const control::References refs;
    const control::ControllerGains gains;
    for (auto _ : bench) {
        auto u = control::passive_control(x, 1.0, wind, refs, gains, p);
        benchmark::DoNotOptimize(u);
    }
}
BENCHMARK(BM_PassiveControl);

void BM_IntegrateClosedLoop(benchmark::State& bench) {
    sim::Scenario sc = scenario::default_config().scenario;
    sc.fault = fault();
    sc.fault.onset_time = 0.05;
    sc.integrator.t_end = 0.1;
    for (auto _ : bench) {
        auto run = sim::integrate(sc);
        benchmark::DoNotOptimize(run);
    }
    bench.SetItemsProcessed(bench.iterations() *
                            static_cast<int64_t>(sc.integrator.t_end / sc.integrator.dt));
}
BENCHMARK(BM_IntegrateClosedLoop)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
