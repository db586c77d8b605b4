#include <gtest/gtest.h>

#include <cmath>

#include "phonongate/analytic.hpp"
#include "phonongate/damping_basis.hpp"
#include "phonongate/dynamics.hpp"
#include "phonongate/errors.hpp"
#include "phonongate/model.hpp"
#include "test_support.hpp"

namespace pg = phonongate;
namespace db = phonongate::dampingbasis;
namespace dyn = phonongate::dynamics;
namespace m = phonongate::model;
namespace an = phonongate::analytic;
using pg::cplx;
using pg::Matrix;
using pg::Vector;
using pg::testing::max_abs;

namespace {

dyn::LindbladGenerator protected_generator(const an::ClosedFormParams& p, int fock) {
    auto params = m::SystemParams::symmetric_spins(p.alpha, p.nbar);
    std::vector<dyn::Dissipator> diss;
    if (p.Gamma > 0.0) diss.push_back(dyn::SpinDephasing{p.Gamma, {}, {}});
    if (p.gamma > 0.0) diss.push_back(dyn::MechanicalDamping{p.gamma, p.nbar});
    return dyn::LindbladGenerator(m::heff_protected(params, fock), diss);
}

const an::ClosedFormParams kDephasing{1.0 / 20.0, 1.0, 2.0, 1e-4, 0.0};
const an::ClosedFormParams kDamping{1.0 / 20.0, 1.0, 2.0, 0.0, 1e-3};

}  // namespace

TEST(DephasingBasis, TableEigenvalues) {
    an::ClosedFormParams p{1.0 / 40.0, 1.0, 2.0, 1e-4, 0.0};
    auto es = db::dephasing_eigensystem(p, 3, 0);
    ASSERT_EQ(es.size(), 4u);
    EXPECT_EQ(es[0].eigenvalue, cplx(0.0));
    EXPECT_EQ(es[1].eigenvalue, cplx(-2e-4));
    EXPECT_NEAR(std::abs(es[2].eigenvalue - cplx(-1e-4, -2.0 * 6.2421875e-4)), 0.0, 1e-18);
    EXPECT_NEAR(std::abs(es[3].eigenvalue - cplx(-1e-4, 2.0 * 6.2421875e-4)), 0.0, 1e-18);
    EXPECT_EQ(es[2].family, db::Family::DephasingPlus);

    an::ClosedFormParams clean = p;
    clean.Gamma = 0.0;
    for (const auto& e : db::dephasing_eigensystem(clean, 4, 3))
        if (e.family == db::Family::DephasingZ) EXPECT_EQ(e.eigenvalue, cplx(0.0));
}

TEST(DephasingBasis, EigenRelationAndBiorthogonality) {
    const int fock = 6;
    auto gen = protected_generator(kDephasing, fock);
    auto es = db::dephasing_eigensystem(kDephasing, fock, fock - 1);
    for (const auto& e : es) {
        Matrix res = gen.apply(e.right.matrix()) - e.eigenvalue * e.right.matrix();
        EXPECT_LE(res.norm(), 1e-10 * e.right.norm()) << db::to_string(e.family) << " n=" << e.n;
        EXPECT_LE(e.eigenvalue.real(), 1e-12);
    }
    for (std::size_t i = 0; i < es.size(); ++i)
        for (std::size_t j = 0; j < es.size(); ++j) {
            const cplx overlap = (es[i].left.matrix() * es[j].right.matrix()).trace();
            EXPECT_NEAR(std::abs(overlap - (i == j ? 1.0 : 0.0)), 0.0, 1e-10) << i << "," << j;
        }
}

TEST(DephasingBasis, SpectrumAgainstDenseLiouvillian) {
    const int fock = 10;
    auto spectrum = db::fock_diagonal_spectrum(protected_generator(kDephasing, fock));
    for (const auto& e : db::dephasing_eigensystem(kDephasing, fock, fock - 1))
        EXPECT_LT(db::spectral_distance(spectrum, e.eigenvalue), 1e-8);
}

TEST(DephasingBasis, Coefficients) {
    auto cold = db::dephasing_coefficients(0.0, 4);
    EXPECT_EQ(cold[0].c1, 1.0);
    for (std::size_t n = 1; n < cold.size(); ++n) EXPECT_EQ(cold[n].c1, 0.0);

    auto warm = db::dephasing_coefficients(2.0, 120);
    EXPECT_NEAR(warm[0].c1, 1.0 / 3.0, 1e-15);
    EXPECT_NEAR(warm[0].c_plus, 2.0 / 3.0, 1e-15);
    EXPECT_NEAR(warm[0].c_minus, 2.0 / 3.0, 1e-15);
    EXPECT_NEAR(warm[0].cz, -1.0 / 3.0, 1e-15);
    double sum = 0.0;
    for (const auto& c : warm) sum += c.c1;
    EXPECT_NEAR(sum, 1.0, 1e-15);
}

TEST(DephasingBasis, PropagationMatchesClosedForm) {
    const auto& ps = m::protected_subspace();
    EXPECT_LT(max_abs(db::dephasing_propagate(0.0, kDephasing, 100) - pg::ops::projector(ps.zero)), 1e-12);
    for (double t : {10.0, 300.0, 1257.0, 5000.0, 3e4})
        EXPECT_LT(max_abs(db::dephasing_propagate(t, kDephasing, 100) - an::reduced_state_spin_dephasing(t, kDephasing)),
                  1e-12);
    Matrix late = db::dephasing_propagate(300.0 / kDephasing.Gamma, kDephasing, 100);
    EXPECT_LT(max_abs(late - Matrix::Identity(4, 4) / 4.0), 1e-12);
    EXPECT_THROW(db::dephasing_propagate(1.0, kDephasing, 20), pg::TruncationError);
}

TEST(DephasingBasis, CompletenessAtTimeZero) {
    const int fock = 60;
    auto layout = m::spin_oscillator_layout(2, fock);
    auto ref = m::thermal_product_state(layout, m::protected_subspace().zero, kDephasing.nbar);
    EXPECT_LT(max_abs(db::dephasing_state(0.0, kDephasing, fock) - ref.matrix()), 1e-10);
}

TEST(DephasingBasis, PropagationMatchesLindbladEvolution) {
    an::ClosedFormParams p = kDephasing;
    p.Gamma = 5e-5;
    const int fock = 57;
    auto params = m::SystemParams::symmetric_spins(p.alpha, p.nbar);
    auto layout = m::spin_oscillator_layout(2, fock);
    const auto& ps = m::protected_subspace();
    dyn::EvolutionSpec spec{m::heff_protected(params, fock)};
    spec.dissipators.push_back(dyn::SpinDephasing{p.Gamma, {}, {}});
    spec.t_final = 2.0 * p.rabi_period();
    for (int i = 0; i <= 20; ++i) spec.times.push_back(spec.t_final * i / 20.0);
    spec.observables.push_back({"F", m::embed_two_spin(layout, pg::ops::projector(ps.zero)), true});
    spec.observables.push_back({"G", m::embed_two_spin(layout, pg::ops::projector(ps.ground)), true});
    spec.tolerance = 1e-9;
    auto tr = dyn::evolve_number_blocks(m::thermal_product_state(layout, ps.zero, p.nbar), spec);
    for (std::size_t i = 0; i < tr.times.size(); ++i) {
        Matrix rho = db::dephasing_propagate(tr.times[i], p, 100);
        EXPECT_NEAR(tr["F"][i], ps.zero.dot(rho * ps.zero).real(), 1e-6);
        EXPECT_NEAR(tr["G"][i], ps.ground.dot(rho * ps.ground).real(), 1e-6);
    }
}

TEST(Laguerre, RecurrenceMatchesExplicitSum) {
    for (int n : {0, 1, 2, 5, 9}) {
        Vector a = db::laguerre_diagonal(n, {0.3, 0.1}, {0.4, -0.05}, 40);
        Vector b = db::laguerre_diagonal_explicit(n, {0.3, 0.1}, {0.4, -0.05}, 40);
        EXPECT_LT(max_abs(a - b), 1e-12 * std::max(1.0, max_abs(b))) << "n=" << n;
    }
    EXPECT_THROW(db::laguerre_diagonal(-1, 0.1, 0.1, 5), pg::ParameterError);
}

TEST(MuFamily, StationaryElementAndBiorthogonality) {
    const int fock = 80;
    Vector mu0 = db::mu_right_diagonal(2.0, 0, fock);
    Vector th = m::thermal_state(2.0, fock).rho.matrix().diagonal();
    EXPECT_LT(max_abs(mu0 - th), 1e-12);
    for (int a = 0; a <= 5; ++a)
        for (int b = 0; b <= 5; ++b)
            EXPECT_NEAR(std::abs(db::mu_overlap(2.0, a, b) - (a == b ? 1.0 : 0.0)), 0.0, 1e-8) << a << "," << b;
    EXPECT_THROW(db::mu_left_diagonal(0.0, 1, 5), pg::DomainError);
}

TEST(EtaFamily, EigenRelationOnGuardedIndices) {
    const int fock = 40, guard = 5;
    auto k = an::damping_constants(kDamping);
    for (int n = 0; n <= 4; ++n) {
        Vector eta = db::eta_right_diagonal(kDamping, k, n, fock);
        Vector res = db::apply_K(eta, kDamping) - db::k_eigenvalue(kDamping, k, n) * eta;
        EXPECT_LT(max_abs(res.head(fock - guard)) / eta.norm(), 1e-8) << "n=" << n;
    }
}

TEST(EtaFamily, Biorthogonality) {
    for (double gamma : {1e-4, 1e-3}) {
        an::ClosedFormParams p = kDamping;
        p.gamma = gamma;
        auto k = an::damping_constants(p);
        for (int a = 0; a <= 5; ++a)
            for (int b = 0; b <= 5; ++b)
                EXPECT_NEAR(std::abs(db::eta_overlap(p, k, a, b) - (a == b ? 1.0 : 0.0)), 0.0, 1e-8)
                    << "gamma " << gamma << " " << a << "," << b;
    }
}

TEST(EtaFamily, SlowestCoherenceInDenseSpectrum) {
    const int fock = 40;
    auto k = an::damping_constants(kDamping);
    const cplx lambda0 = an::eta_eigenvalue(kDamping, k, 0);
    EXPECT_NEAR(lambda0.real(), -kDamping.gamma * (k.xi - 1.0).real(), 1e-15);
    auto spectrum = db::fock_diagonal_spectrum(protected_generator(kDamping, fock));
    EXPECT_LT(db::spectral_distance(spectrum, lambda0), 1e-8);
}

TEST(DampingBasis, EigenvaluesStableAndNbarZeroRejected) {
    for (const auto& e : db::damping_eigensystem(kDamping, 30, 6)) EXPECT_LE(e.eigenvalue.real(), 1e-12);
    an::ClosedFormParams cold = kDamping;
    cold.nbar = 0.0;
    EXPECT_THROW(db::damping_eigensystem(cold, 10, 3), pg::DomainError);
    an::ClosedFormParams undamped = kDamping;
    undamped.gamma = 0.0;
    EXPECT_THROW(db::damping_propagate(1.0, undamped), pg::DomainError);
}

TEST(DampingBasis, SeriesMatchesClosedForm) {
    an::ClosedFormParams p = kDamping;
    p.gamma = 1e-4;
    const auto& ps = m::protected_subspace();
    auto start = db::damping_propagate(0.0, p);
    EXPECT_LT(max_abs(start.series - pg::ops::projector(ps.zero)), 1e-10);
    const double tau = p.rabi_period();
    for (int i = 0; i <= 10; ++i) {
        auto r = db::damping_propagate(tau * i / 10.0, p);
        EXPECT_LT(r.difference, 1e-8);
        EXPECT_NEAR(std::abs(r.Y_series - r.Y_closed), 0.0, 1e-8);
    }
}

TEST(DampingBasis, CompletenessAtTimeZero) {
    const int fock = 60;
    auto layout = m::spin_oscillator_layout(2, fock);
    auto ref = m::thermal_product_state(layout, m::protected_subspace().zero, kDamping.nbar);
    EXPECT_LT(max_abs(db::damping_state(0.0, kDamping, fock, 80) - ref.matrix()), 1e-10);
}

TEST(DampingBasis, SeriesMatchesLindbladEvolution) {
    an::ClosedFormParams p{1.0 / 20.0, 1.0, 0.5, 0.0, 1e-4};
    const int fock = 26;
    auto params = m::SystemParams::symmetric_spins(p.alpha, p.nbar);
    auto layout = m::spin_oscillator_layout(2, fock);
    const auto& ps = m::protected_subspace();
    dyn::EvolutionSpec spec{m::heff_protected(params, fock)};
    spec.dissipators.push_back(dyn::MechanicalDamping{p.gamma, p.nbar});
    spec.t_final = p.rabi_period();
    for (int i = 0; i <= 10; ++i) spec.times.push_back(spec.t_final * i / 10.0);
    spec.observables.push_back({"F", m::embed_two_spin(layout, pg::ops::projector(ps.zero)), true});
    spec.tolerance = 1e-7;
    auto tr = dyn::evolve(m::thermal_product_state(layout, ps.zero, p.nbar), spec);
    for (std::size_t i = 0; i < tr.times.size(); ++i) {
        auto r = db::damping_propagate(tr.times[i], p);
        EXPECT_NEAR(tr["F"][i], ps.zero.dot(r.series * ps.zero).real(), 1e-3);
    }
}
