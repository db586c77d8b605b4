#include <benchmark/benchmark.h>

#include "phonongate/analytic.hpp"
#include "phonongate/dynamics.hpp"
#include "phonongate/gate.hpp"
#include "phonongate/model.hpp"

namespace pg = phonongate;

namespace {

void BM_LindbladApply(benchmark::State& state) {
    const int fock = static_cast<int>(state.range(0));
    auto params = pg::model::SystemParams::symmetric_spins(1.0 / 40.0, 2.0);
    const auto h = pg::model::heff_protected(params, fock);
    const std::vector<pg::dynamics::Dissipator> diss{pg::dynamics::SpinDephasing{5e-5},
                                                     pg::dynamics::MechanicalDamping{1e-4, 2.0}};
    const pg::dynamics::LindbladGenerator gen(h, diss);
    const auto rho = pg::model::thermal_product_state(h.layout(), pg::model::protected_subspace().zero, 2.0);
    pg::Matrix out;
    pg::dynamics::LindbladGenerator::Workspace ws;
    for (auto _ : state) {
        gen.apply(rho.matrix(), out, ws);
        benchmark::DoNotOptimize(out.data());
    }
}
BENCHMARK(BM_LindbladApply)->Arg(10)->Arg(20)->Arg(40)->Arg(60);

void BM_FidelityClosedForm(benchmark::State& state) {
    const pg::analytic::ClosedFormParams p{1.0 / 40.0, 1.0, static_cast<double>(state.range(0)), 0.0, 0.0};
    const double tau = p.rabi_period();
    for (auto _ : state) benchmark::DoNotOptimize(pg::analytic::fidelity_F(tau, p));
}
BENCHMARK(BM_FidelityClosedForm)->Arg(0)->Arg(2)->Arg(10);

void BM_YFunction(benchmark::State& state) {
    const pg::analytic::ClosedFormParams p{1.0 / 20.0, 1.0, 2.0, 0.0, 1e-4};
    const auto k = pg::analytic::damping_constants(p);
    const double tau = p.rabi_period();
    for (auto _ : state) benchmark::DoNotOptimize(pg::analytic::Y_function(tau, p, k));
}
BENCHMARK(BM_YFunction);

void BM_GateNoiseFree(benchmark::State& state) {
    const auto config = pg::gate::GateConfig::standard(1.0 / 40.0, static_cast<double>(state.range(0)));
    const auto in = pg::gate::logical_state(1, 0, 0, 0);
    const auto target = pg::gate::logical_state(-1, 0, 0, 0);
    for (auto _ : state) benchmark::DoNotOptimize(pg::gate::run_gate(config, in, target).fidelity);
}
BENCHMARK(BM_GateNoiseFree)->Arg(0)->Arg(2)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
