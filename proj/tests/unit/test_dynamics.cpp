#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "phonongate/analytic.hpp"
#include "phonongate/dynamics.hpp"
#include "phonongate/errors.hpp"
#include "phonongate/model.hpp"
#include "test_support.hpp"

namespace pg = phonongate;
namespace dyn = phonongate::dynamics;
namespace m = phonongate::model;
namespace an = phonongate::analytic;
using pg::Matrix;
using pg::testing::max_abs;

namespace {

struct ProtectedSetup {
    pg::SpaceLayout layout;
    pg::DensityOperator rho0;
    dyn::EvolutionSpec spec;
    an::ClosedFormParams cf;
};

/// heff_protected from mu_th |0><0| with a uniform grid over `periods` Rabi periods.
ProtectedSetup protected_setup(double alpha, double nbar, int fock, double Gamma, double gamma, double periods,
                               int points = 41) {
    auto params = m::SystemParams::symmetric_spins(alpha, nbar);
    auto layout = m::spin_oscillator_layout(2, fock);
    const auto& ps = m::protected_subspace();
    an::ClosedFormParams cf{alpha, 1.0, nbar, Gamma, gamma};
    dyn::EvolutionSpec spec{m::heff_protected(params, fock)};
    if (Gamma > 0.0) spec.dissipators.push_back(dyn::SpinDephasing{Gamma, {}, {}});
    if (gamma > 0.0) spec.dissipators.push_back(dyn::MechanicalDamping{gamma, nbar});
    spec.t_final = periods * cf.rabi_period();
    for (int i = 0; i < points; ++i) spec.times.push_back(spec.t_final * i / (points - 1));
    spec.observables.push_back({"F", m::embed_two_spin(layout, pg::ops::projector(ps.zero)), true});
    spec.observables.push_back({"S", m::embed_two_spin(layout, 0.5 * ps.sy), false});
    spec.tolerance = 1e-9;
    return {layout, m::thermal_product_state(layout, ps.zero, nbar), std::move(spec), cf};
}

}  // namespace

TEST(LindbladRhs, ThermalStateIsStationaryUnderDamping) {
    const int fock = 25;
    auto layout = m::spin_oscillator_layout(2, fock);
    auto rho = m::thermal_product_state(layout, m::protected_subspace().one, 0.8);
    dyn::EvolutionSpec spec{pg::Operator::zero(layout)};
    spec.dissipators.push_back(dyn::MechanicalDamping{0.01, 0.8});
    spec.t_final = 1.0;
    // Only the top level sees the truncated a^dagger; its weight is q^N.
    Matrix rhs = dyn::lindblad_rhs(rho, spec).matrix();
    EXPECT_LT(max_abs(rhs), 0.01 * 0.8 * fock * std::pow(0.8 / 1.8, fock - 1) * 2.0);
}

TEST(LindbladRhs, MaximallyMixedSpinsAreFixedUnderDephasing) {
    const int fock = 6;
    auto layout = m::spin_oscillator_layout(2, fock);
    Matrix rho = pg::ops::kron(Matrix::Identity(4, 4) / 4.0, m::thermal_state(1.0, fock).rho.matrix());
    pg::DensityOperator dm(pg::Operator(layout, rho / rho.trace().real()));
    dyn::EvolutionSpec spec{pg::Operator::zero(layout)};
    spec.dissipators.push_back(dyn::SpinDephasing{3e-3, {}, {}});
    spec.t_final = 1.0;
    EXPECT_LT(max_abs(dyn::lindblad_rhs(dm, spec).matrix()), 1e-16);
}

TEST(LindbladRhs, TracelessAndHermitianForRandomStates) {
    std::mt19937_64 rng(13);
    const int fock = 5;
    auto layout = m::spin_oscillator_layout(2, fock);
    for (int trial = 0; trial < 5; ++trial) {
        pg::DensityOperator rho(pg::Operator(layout, pg::testing::random_density(layout.dim(), rng)));
        dyn::EvolutionSpec spec{pg::Operator(layout, pg::testing::random_hermitian(layout.dim(), rng))};
        spec.dissipators = {dyn::SpinDephasing{0.3, {}, {}}, dyn::MechanicalDamping{0.2, 1.5}};
        spec.t_final = 1.0;
        Matrix d = dyn::lindblad_rhs(rho, spec).matrix();
        EXPECT_LT(std::abs(d.trace()), 1e-12);
        EXPECT_LT(max_abs(d - d.adjoint()), 1e-12);
    }
}

TEST(LindbladRhs, LayoutMismatchThrows) {
    auto layout = m::spin_oscillator_layout(2, 4);
    auto other = m::spin_oscillator_layout(2, 5);
    pg::DensityOperator rho(pg::Operator(other, Matrix::Identity(20, 20) / 20.0));
    dyn::EvolutionSpec spec{pg::Operator::zero(layout)};
    spec.t_final = 1.0;
    EXPECT_THROW(dyn::lindblad_rhs(rho, spec), pg::LayoutError);
}

TEST(EvolutionSpecTest, Validation) {
    auto layout = m::spin_oscillator_layout(2, 3);
    dyn::EvolutionSpec spec{pg::Operator::zero(layout)};
    EXPECT_THROW(spec.validate(), pg::ParameterError);
    spec.t_final = 2.0;
    EXPECT_NO_THROW(spec.validate());
    spec.times = {0.0, 3.0};
    EXPECT_THROW(spec.validate(), pg::ParameterError);
    spec.times = {1.0, 0.5};
    EXPECT_THROW(spec.validate(), pg::ParameterError);
    spec.times.clear();
    spec.dt = -1.0;
    EXPECT_THROW(spec.validate(), pg::ParameterError);
    spec.dt.reset();
    spec.dissipators.push_back(dyn::SpinDephasing{-1.0, {}, {}});
    pg::DensityOperator rho(pg::Operator(layout, Matrix::Identity(12, 12) / 12.0));
    EXPECT_THROW(dyn::evolve(rho, spec), pg::ParameterError);
}

TEST(Evolve, ProtectedModelMatchesClosedForm) {
    auto s = protected_setup(1.0 / 20.0, 0.5, 24, 0.0, 0.0, 1.0);
    auto tr = dyn::evolve(s.rho0, s.spec);
    for (std::size_t i = 0; i < tr.times.size(); ++i) {
        EXPECT_NEAR(tr["F"][i], an::fidelity_F(tr.times[i], s.cf), 1e-6);
        EXPECT_NEAR(tr["S"][i], an::coherence_S(tr.times[i], s.cf), 1e-6);
    }
    EXPECT_LT(tr.metadata.max_trace_drift, 1e-8);
    EXPECT_GT(tr.metadata.halvings, 0);
}

TEST(Evolve, SpinDephasingMatchesClosedForm) {
    auto s = protected_setup(1.0 / 20.0, 0.5, 24, 1e-4, 0.0, 1.0);
    s.spec.check_positivity = true;
    auto tr = dyn::evolve(s.rho0, s.spec);
    for (std::size_t i = 0; i < tr.times.size(); ++i)
        EXPECT_NEAR(tr["F"][i], an::fidelity_spin_dephasing(tr.times[i], s.cf), 1e-6);
    EXPECT_GE(tr.metadata.min_eigenvalue, -1e-6);
}

TEST(Evolve, MechanicalDampingMatchesClosedForm) {
    auto s = protected_setup(1.0 / 20.0, 0.5, 26, 0.0, 1e-3, 1.0, 21);
    s.spec.tolerance = 1e-7;
    auto tr = dyn::evolve(s.rho0, s.spec);
    for (std::size_t i = 0; i < tr.times.size(); ++i)
        EXPECT_NEAR(tr["F"][i], an::fidelity_mech(tr.times[i], s.cf), 1e-5);
}

TEST(Evolve, KeepsStatesHermitianPositiveAndNormalised) {
    auto s = protected_setup(1.0 / 20.0, 1.0, 20, 2e-4, 5e-4, 0.5, 6);
    s.spec.keep_states = true;
    s.spec.check_positivity = true;
    s.spec.tolerance = 1e-7;
    auto tr = dyn::evolve(s.rho0, s.spec);
    ASSERT_EQ(tr.states.size(), tr.times.size());
    for (const auto& rho : tr.states) {
        EXPECT_NEAR(rho.matrix().trace().real(), 1.0, 1e-8);  // tail 2^-20 was renormalised
        EXPECT_LT(max_abs(rho.matrix() - rho.matrix().adjoint()), 1e-12);
        EXPECT_GE(rho.min_eigenvalue(), -1e-6);
    }
}

TEST(Evolve, AgreesWithUnitaryPropagationWithoutDissipators) {
    std::mt19937_64 rng(23);
    pg::SpaceLayout layout = pg::SpaceLayout::single("x", 6);
    pg::Operator h(layout, pg::testing::random_hermitian(6, rng));
    pg::Operator obs(layout, pg::testing::random_hermitian(6, rng));
    pg::DensityOperator rho(pg::Operator(layout, pg::testing::random_density(6, rng)));
    dyn::EvolutionSpec spec{h};
    spec.t_final = 3.0;
    spec.times = {0.0, 1.0, 2.0, 3.0};
    spec.observables.push_back({"O", obs, false});
    spec.tolerance = 1e-10;
    auto tr = dyn::evolve(rho, spec);
    for (std::size_t i = 0; i < spec.times.size(); ++i)
        EXPECT_NEAR(tr["O"][i], pg::expm_apply(h, rho, spec.times[i]).expectation(obs), 1e-8);
}

TEST(Evolve, DampingRelaxesOscillatorToThermalState) {
    const int fock = 30;
    const double gamma = 0.05, nbar = 1.0;
    pg::SpaceLayout layout = pg::SpaceLayout::single(m::kOscLabel, fock);
    pg::DensityOperator rho(pg::Operator(layout, pg::ops::projector(pg::ops::basis(fock, 3))));
    dyn::EvolutionSpec spec{pg::Operator::zero(layout)};
    spec.dissipators.push_back(dyn::MechanicalDamping{gamma, nbar});
    spec.t_final = 20.0 / gamma;
    spec.times = {spec.t_final};
    spec.keep_states = true;
    spec.tolerance = 1e-9;
    auto tr = dyn::evolve(rho, spec);
    Matrix target = m::thermal_state(nbar, fock).rho.matrix();
    EXPECT_LT((tr.states.back().matrix() - target).norm(), 1e-4);
}

TEST(Evolve, DephasingDrivesSpinsToMaximallyMixed) {
    auto s = protected_setup(1.0 / 20.0, 0.0, 2, 0.05, 0.0, 0.0);
    s.spec.t_final = 800.0;
    s.spec.times = {0.0, 400.0, 800.0};
    s.spec.keep_states = true;
    auto tr = dyn::evolve(s.rho0, s.spec);
    Matrix spins = pg::partial_trace(tr.states.back(), {"spin1", "spin2"}).matrix();
    EXPECT_LT(max_abs(spins - Matrix::Identity(4, 4) / 4.0), 1e-9);
}

TEST(Evolve, StepControlFailureRaises) {
    auto s = protected_setup(1.0 / 20.0, 0.5, 10, 0.0, 0.0, 1.0, 5);
    s.spec.max_halvings = 1;
    s.spec.tolerance = 1e-300;
    EXPECT_THROW(dyn::evolve(s.rho0, s.spec), pg::IntegratorError);
}

TEST(NumberBlocks, AgreesWithFullEvolution) {
    auto s = protected_setup(1.0 / 20.0, 1.0, 18, 2e-4, 0.0, 1.0, 21);
    auto full = dyn::evolve(s.rho0, s.spec);
    auto blocks = dyn::evolve_number_blocks(s.rho0, s.spec);
    for (const char* name : {"F", "S"})
        for (std::size_t i = 0; i < full.times.size(); ++i)
            EXPECT_NEAR(blocks[name][i], full[name][i], 1e-8) << name << " at " << full.times[i];
    EXPECT_FALSE(blocks.metadata.notes.empty());
}

TEST(NumberBlocks, LargeThermalCaseMatchesClosedForm) {
    auto s = protected_setup(1.0 / 40.0, 2.0, 57, 0.0, 0.0, 1.0);
    auto tr = dyn::evolve_number_blocks(s.rho0, s.spec);
    for (std::size_t i = 0; i < tr.times.size(); ++i)
        EXPECT_NEAR(tr["F"][i], an::fidelity_F(tr.times[i], s.cf), 1e-6);
}

TEST(NumberBlocks, RejectsCouplingsBetweenLevels) {
    auto damped = protected_setup(1.0 / 20.0, 1.0, 8, 0.0, 1e-3, 0.2, 3);
    EXPECT_THROW(dyn::evolve_number_blocks(damped.rho0, damped.spec), pg::ModelError);

    auto params = m::SystemParams::symmetric_spins(1.0 / 20.0, 1.0);
    auto tc = protected_setup(1.0 / 20.0, 1.0, 8, 0.0, 0.0, 0.2, 3);
    tc.spec.hamiltonian = m::tavis_cummings(params, 8, m::Frame::Oscillator);
    EXPECT_THROW(dyn::evolve_number_blocks(tc.rho0, tc.spec), pg::ModelError);
}

TEST(FastComponent, ConstantAndOscillatingSeries) {
    std::vector<double> flat(200, 0.7);
    EXPECT_NEAR(dyn::fast_component_rms(flat, 16), 0.0, 1e-15);
    std::vector<double> wave(400);
    for (std::size_t i = 0; i < wave.size(); ++i) wave[i] = 0.3 * std::sin(2.0 * std::numbers::pi * i / 16.0);
    EXPECT_NEAR(dyn::fast_component_rms(wave, 17), 0.3 / std::sqrt(2.0), 0.02);
    EXPECT_THROW(dyn::fast_component_rms(wave, 2), pg::ParameterError);
}

TEST(ExactVsEffective, ZeroTemperatureDeviationSmall) {
    auto params = m::SystemParams::symmetric_spins(1.0 / 40.0, 0.0);
    const double tau = 2.0 * std::numbers::pi / params.gbar();
    std::vector<double> times;
    for (int i = 0; i <= 400; ++i) times.push_back(tau * i / 400.0);
    dyn::ComparisonOptions opt;
    opt.fock = 8;
    auto c = dyn::exact_vs_effective(params, times, opt);
    EXPECT_LT(c.max_deviation, 0.01);
    EXPECT_NEAR(c.F_exact.front(), 1.0, 1e-12);
}

TEST(ExactVsEffective, DressedInitialStateShrinksDiscrepancy) {
    auto params = m::SystemParams::symmetric_spins(1.0 / 40.0, 0.0);
    const double tau = 2.0 * std::numbers::pi / params.gbar();
    std::vector<double> times;
    for (int i = 0; i <= 200; ++i) times.push_back(tau * i / 200.0);
    dyn::ComparisonOptions bare, dressed;
    bare.fock = dressed.fock = 8;
    dressed.dress_initial_state = true;
    EXPECT_LT(dyn::exact_vs_effective(params, times, dressed).max_deviation,
              dyn::exact_vs_effective(params, times, bare).max_deviation);
}

TEST(Evolve, InducedCollectiveRelaxationIsOfOrderAlphaSquaredGamma) {
    // Damping through the exact coupling relaxes the spins at a rate of order
    // alpha^2 gamma, which the effective model leaves out. At nbar = 0 the
    // effective model is unaffected by damping.
    const double alpha = 1.0 / 20.0, gamma = 1e-3;
    const int fock = 5;
    auto params = m::SystemParams::symmetric_spins(alpha, 0.0);
    const auto layout = m::spin_oscillator_layout(2, fock);
    const auto& ps = m::protected_subspace();
    const an::ClosedFormParams cf{alpha, 1.0, 0.0, 0.0, gamma};
    const double tau = cf.rabi_period();

    auto final_F = [&](const pg::Operator& h, double rate) {
        dyn::EvolutionSpec spec{h};
        if (rate > 0.0) spec.dissipators.push_back(dyn::MechanicalDamping{rate, 0.0});
        spec.t_final = tau;
        spec.times = {0.0, tau};
        spec.observables.push_back({"F", m::embed_two_spin(layout, pg::ops::projector(ps.zero)), true});
        spec.tolerance = 1e-7;
        return dyn::evolve(m::thermal_product_state(layout, ps.zero, 0.0), spec)["F"].back();
    };
    const auto exact = m::tavis_cummings(params, fock, m::Frame::Oscillator);
    const auto effective = m::heff_protected(params, fock);
    const double drop_exact = final_F(exact, 0.0) - final_F(exact, gamma);
    const double drop_effective = final_F(effective, 0.0) - final_F(effective, gamma);
    const double scale = alpha * alpha * gamma * tau;
    EXPECT_NEAR(drop_effective, 0.0, 1e-9);
    EXPECT_GT(drop_exact, 0.25 * scale);
    EXPECT_LT(drop_exact, 4.0 * scale);
}
