#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

#include "phonongate/analytic.hpp"
#include "phonongate/errors.hpp"
#include "test_support.hpp"

namespace pg = phonongate;
namespace an = phonongate::analytic;
using pg::cplx;
using pg::Matrix;
using pg::testing::max_abs;

namespace {

constexpr double kPi = std::numbers::pi;

double f_rate(double alpha, double n) { return alpha * alpha - 2.0 * std::pow(alpha, 4) * (2.0 * n + 1.0); }

/// Population of |0> and <sy>/2 summed block by block, H_n = f(n) sx.
std::pair<double, double> fock_sum_oracle(double t, double alpha, double nbar, int terms) {
    const double q = nbar / (nbar + 1.0);
    double F = 0.0, S = 0.0, w = 1.0 - q;
    for (int n = 0; n < terms; ++n, w *= q) {
        const double phi = f_rate(alpha, n) * t;
        F += w * std::cos(phi) * std::cos(phi);
        S += w * (-0.5 * std::sin(2.0 * phi));
    }
    return {F, S};
}

using Mat4 = Eigen::Matrix4cd;

/// Two spins, H = f sx on {|0>,|1>}, jumps sqrt(Gamma/2) sigma_x on each spin.
/// Product basis index s1*2 + s2 with 0 = |+>, 1 = |->.
double dephasing_block_oracle(double t, double alpha, int n, double Gamma) {
    Mat4 x1 = Mat4::Zero(), x2 = Mat4::Zero();
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
            x1((1 - a) * 2 + b, a * 2 + b) = 1.0;
            x2(a * 2 + (1 - b), a * 2 + b) = 1.0;
        }
    Mat4 h = Mat4::Zero();
    h(2, 1) = h(1, 2) = f_rate(alpha, n);  // |0> = |-+> = 2, |1> = |+-> = 1
    auto rhs = [&](const Mat4& r) -> Mat4 {
        Mat4 out = -pg::kI * (h * r - r * h);
        out += 0.5 * Gamma * (x1 * r * x1 + x2 * r * x2 - 2.0 * r);
        return out;
    };
    Mat4 r = Mat4::Zero();
    r(2, 2) = 1.0;
    const int steps = std::max(1, static_cast<int>(std::ceil(t / 2.0)));
    const double dt = t / steps;
    for (int i = 0; i < steps; ++i) {
        Mat4 k1 = rhs(r), k2 = rhs(r + 0.5 * dt * k1), k3 = rhs(r + 0.5 * dt * k2), k4 = rhs(r + dt * k3);
        r += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return r(2, 2).real();
}

/// Number-diagonal blocks r_n (2x2 on {|0>,|1>}) under H = f(n) sx and
/// thermal mechanical damping; returns F_M(t) = sum_n <0|r_n|0>.
double mech_oracle(double t, double alpha, double nbar, double gamma, int fock, double dt_max) {
    using Block = Eigen::Matrix2cd;
    std::vector<Block> r(fock, Block::Zero());
    const double q = nbar / (nbar + 1.0);
    double w = 1.0 - q;
    for (int n = 0; n < fock; ++n, w *= q) r[n](0, 0) = w;
    Block sx;
    sx << 0, 1, 1, 0;
    auto rhs = [&](const std::vector<Block>& x) {
        std::vector<Block> d(fock);
        for (int n = 0; n < fock; ++n) {
            const Block h = f_rate(alpha, n) * sx;
            Block v = -pg::kI * (h * x[n] - x[n] * h);
            v -= gamma * ((nbar + 1.0) * n + nbar * (n + 1.0)) * x[n];
            if (n + 1 < fock) v += gamma * (nbar + 1.0) * (n + 1.0) * x[n + 1];
            if (n > 0) v += gamma * nbar * n * x[n - 1];
            d[n] = v;
        }
        return d;
    };
    auto axpy = [&](const std::vector<Block>& x, double a, const std::vector<Block>& y) {
        std::vector<Block> z(fock);
        for (int n = 0; n < fock; ++n) z[n] = x[n] + a * y[n];
        return z;
    };
    const int steps = std::max(1, static_cast<int>(std::ceil(t / dt_max)));
    const double dt = t / steps;
    for (int i = 0; i < steps; ++i) {
        auto k1 = rhs(r), k2 = rhs(axpy(r, dt / 2, k1)), k3 = rhs(axpy(r, dt / 2, k2)), k4 = rhs(axpy(r, dt, k3));
        for (int n = 0; n < fock; ++n) r[n] += dt / 6.0 * (k1[n] + 2.0 * k2[n] + 2.0 * k3[n] + k4[n]);
    }
    double F = 0.0;
    for (const auto& b : r) F += b(0, 0).real();
    return F;
}

bool is_density(const Matrix& rho, double tol) {
    if (std::abs(rho.trace() - 1.0) > tol) return false;
    if ((rho - rho.adjoint()).norm() > tol) return false;
    Eigen::SelfAdjointEigenSolver<Matrix> es(rho);
    return es.eigenvalues().minCoeff() > -tol;
}

}  // namespace

TEST(ClosedForm, ParamsValidation) {
    EXPECT_NO_THROW((an::ClosedFormParams{1.0 / 40.0, 1.0, 2.0, 0.0, 0.0}.validate()));
    EXPECT_THROW((an::ClosedFormParams{0.3, 1.0, 2.0, 0.0, 0.0}.validate()), pg::ParameterError);
    EXPECT_THROW((an::ClosedFormParams{0.05, 1.0, -1.0, 0.0, 0.0}.validate()), pg::ParameterError);
    EXPECT_THROW((an::ClosedFormParams{0.05, 1.0, 1.0, -1e-3, 0.0}.validate()), pg::ParameterError);
    an::ClosedFormParams p{1.0 / 40.0, 1.0, 2.0, 0.0, 0.0};
    EXPECT_NEAR(p.rabi_period(), 2.0 * kPi / 1.2484375e-3, 1e-9);
}

TEST(Coherence, InitialValuesAndZeroTemperature) {
    for (double nbar : {0.0, 0.5, 2.0, 10.0}) {
        an::ClosedFormParams p{1.0 / 40.0, 1.0, nbar, 0.0, 0.0};
        EXPECT_NEAR(an::coherence_C(0.0, p), 0.5, 1e-14);
        EXPECT_NEAR(an::coherence_S(0.0, p), 0.0, 1e-14);
        EXPECT_NEAR(an::fidelity_F(0.0, p), 1.0, 1e-14);
    }
    an::ClosedFormParams cold{1.0 / 20.0, 1.0, 0.0, 0.0, 0.0};
    for (double t : {10.0, 333.0, 1000.0})
        EXPECT_NEAR(an::coherence_C(t, cold), 0.5 * std::cos(cold.gbar() * t), 1e-14);
    EXPECT_NEAR(an::fidelity_F(kPi / cold.gbar(), cold), 0.0, 1e-14);
}

TEST(Coherence, MatchesFockSumOracle) {
    for (double alpha : {1.0 / 20.0, 1.0 / 40.0})
        for (double nbar : {0.5, 2.0, 10.0}) {
            an::ClosedFormParams p{alpha, 1.0, nbar, 0.0, 0.0};
            for (double frac : {0.05, 0.25, 0.6, 1.0, 2.7}) {
                const double t = frac * p.rabi_period();
                auto [F, S] = fock_sum_oracle(t, alpha, nbar, 2000);
                EXPECT_NEAR(an::fidelity_F(t, p), F, 1e-12);
                EXPECT_NEAR(an::coherence_S(t, p), S, 1e-12);
                EXPECT_NEAR(an::fidelity_F_bruteforce(t, p, 2000), F, 1e-12);
            }
        }
}

TEST(Coherence, FidelityAtRabiPeriodMatchesExpansion) {
    an::ClosedFormParams p{1.0 / 40.0, 1.0, 2.0, 0.0, 0.0};
    const double expansion = 1.0 - 16.0 * kPi * kPi * 2.0 * 5.0 * std::pow(1.0 / 40.0, 4);
    EXPECT_NEAR(an::fidelity_F(p.rabi_period(), p), expansion, 1e-4);
}

TEST(Coherence, FidelityStaysInUnitInterval) {
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> a(0.01, 0.2), nb(0.0, 20.0), tt(0.0, 1e5);
    for (int i = 0; i < 200; ++i) {
        an::ClosedFormParams p{a(rng), 1.0, nb(rng), 0.0, 0.0};
        const double F = an::fidelity_F(tt(rng), p);
        EXPECT_GE(F, -1e-12);
        EXPECT_LE(F, 1.0 + 1e-12);
    }
}

TEST(SpinDephasing, LimitsAndReducedState) {
    an::ClosedFormParams p{1.0 / 20.0, 1.0, 2.0, 1e-4, 0.0};
    EXPECT_NEAR(an::fidelity_spin_dephasing(0.0, p), 1.0, 1e-14);
    EXPECT_NEAR(an::fidelity_spin_dephasing(10.0 / p.Gamma, p), 0.25, 1e-3);

    an::ClosedFormParams clean = p;
    clean.Gamma = 0.0;
    for (double t : {100.0, 700.0, 2500.0}) EXPECT_NEAR(an::fidelity_spin_dephasing(t, clean), an::fidelity_F(t, clean), 1e-14);

    for (double t : {0.0, 50.0, 900.0, 4000.0, 1e6}) {
        Matrix rho = an::reduced_state_spin_dephasing(t, p);
        EXPECT_TRUE(is_density(rho, 1e-12)) << "t = " << t;
    }
    Matrix late = an::reduced_state_spin_dephasing(200.0 / p.Gamma, p);
    EXPECT_LT(max_abs(late - Matrix::Identity(4, 4) / 4.0), 1e-12);
}

TEST(SpinDephasing, MatchesBlockwiseLindbladOracle) {
    const double alpha = 1.0 / 20.0, nbar = 2.0;
    for (double Gamma : {2.5e-5, 1e-4}) {
        an::ClosedFormParams p{alpha, 1.0, nbar, Gamma, 0.0};
        const double q = nbar / (nbar + 1.0);
        for (double frac : {0.3, 1.0}) {
            const double t = frac * p.rabi_period();
            double oracle = 0.0, w = 1.0 - q;
            for (int n = 0; n < 70; ++n, w *= q) oracle += w * dephasing_block_oracle(t, alpha, n, Gamma);
            EXPECT_NEAR(an::fidelity_spin_dephasing(t, p), oracle, 1e-9) << "Gamma " << Gamma << " t/tau " << frac;
        }
    }
}

TEST(MechanicalDamping, TrivialValues) {
    an::ClosedFormParams p{1.0 / 20.0, 1.0, 2.0, 0.0, 1e-3};
    EXPECT_NEAR(std::abs(an::Y_function(0.0, p) - 1.0), 0.0, 1e-12);
    EXPECT_NEAR(an::fidelity_mech(0.0, p), 1.0, 1e-12);
    EXPECT_NEAR(std::imag(an::Y_function(0.0, p)), 0.0, 1e-12);

    an::ClosedFormParams weak = p;
    weak.gamma = 1e-10;
    for (double frac : {0.2, 0.7, 1.0}) {
        const double t = frac * p.rabi_period();
        EXPECT_NEAR(an::fidelity_mech(t, weak), an::fidelity_F(t, weak), 1e-6);
    }
}

TEST(MechanicalDamping, YBoundedAndSpectrumStable) {
    an::ClosedFormParams p{1.0 / 20.0, 1.0, 2.0, 0.0, 1e-3};
    for (int i = 0; i <= 300; ++i) EXPECT_LE(std::abs(an::Y_function(i * 3.0 * p.rabi_period() / 300.0, p)), 1.0 + 1e-12);
    for (int sign : {+1, -1}) {
        auto k = an::damping_constants(p, sign);
        for (int n = 0; n <= 20; ++n) EXPECT_LE(an::eta_eigenvalue(p, k, n, sign).real(), 1e-12);
    }
    EXPECT_THROW(an::damping_constants(an::ClosedFormParams{0.05, 1.0, 2.0, 0.0, 0.0}), pg::DomainError);
    EXPECT_THROW(an::damping_constants(p, 0), pg::ParameterError);
}

TEST(MechanicalDamping, MatchesNumberBlockOracle) {
    const double alpha = 1.0 / 20.0, nbar = 2.0;
    for (double gamma : {1e-4, 1e-3}) {
        an::ClosedFormParams p{alpha, 1.0, nbar, 0.0, gamma};
        for (double frac : {0.25, 0.5, 1.0}) {
            const double t = frac * p.rabi_period();
            const double oracle = mech_oracle(t, alpha, nbar, gamma, 90, 0.5);
            EXPECT_NEAR(an::fidelity_mech(t, p), oracle, 1e-8) << "gamma " << gamma << " t/tau " << frac;
        }
    }
}

TEST(MechanicalDamping, WeakDampingKeepsRabiPeriodFidelity) {
    an::ClosedFormParams p{1.0 / 20.0, 1.0, 2.0, 0.0, 1e-4};
    const double tau = p.rabi_period();
    EXPECT_GT(an::fidelity_mech(tau, p), 0.99);
    EXPECT_LE(std::abs(an::fidelity_mech(tau, p) - an::fidelity_F(tau, p)), 0.005);
    for (double t : {0.0, tau / 3, tau / 2, tau}) EXPECT_TRUE(is_density(an::reduced_state_mech(t, p), 1e-12));
}

TEST(Infidelity, SpotValues) {
    EXPECT_NEAR(an::infidelity_thermal(10.0, 1.0 / 40.0), 0.01295, 5e-4);
    EXPECT_NEAR(an::infidelity_thermal(10.0, 1.0 / 40.0), 16.0 * kPi * kPi * 10.0 * 21.0 / std::pow(40.0, 4), 1e-15);
    EXPECT_NEAR(an::infidelity_thermal(2.0, 1.0 / 20.0), 9.87e-3, 5e-6);
    EXPECT_EQ(an::infidelity_unprotected(0.125), 0.1);
    EXPECT_NEAR(an::infidelity_unprotected(2.0), 0.4, 1e-15);
    EXPECT_EQ(an::infidelity_unprotected(0.0), 0.0);

    an::ClosedFormParams p{1.0 / 40.0, 1.0, 2.0, 1e-6, 0.0};
    const double a2 = 1.0 / 1600.0;
    EXPECT_NEAR(an::infidelity_total(p),
                an::infidelity_thermal(2.0, 1.0 / 40.0) + kPi * 1e-6 / (a2 - 2.0 * a2 * a2), 1e-15);
}

TEST(Infidelity, IncreasesWithTemperature) {
    double last = -1.0;
    for (double nbar : {0.0, 1.0, 2.0, 5.0, 10.0}) {
        const double v = an::infidelity_thermal(nbar, 1.0 / 40.0);
        EXPECT_GT(v, last);
        last = v;
    }
}

TEST(Feasibility, BothGammaInterpretationsAndFlags) {
    auto r = an::feasibility(an::DeviceParams{});
    ASSERT_EQ(r.estimates.size(), 2u);
    EXPECT_EQ(r.estimates[0].unit, an::GammaUnit::Angular);
    EXPECT_EQ(r.estimates[1].unit, an::GammaUnit::Ordinary);
    EXPECT_NEAR(r.estimates[0].alpha, 1.0 / 40.0, 1e-15);
    EXPECT_NEAR(r.estimates[0].fidelity, 0.8612, 1e-4);
    EXPECT_NEAR(r.estimates[1].fidelity, 0.9670, 1e-4);
    EXPECT_NEAR(r.estimates[0].Gamma_over_delta, 2.5e-5, 1e-18);
    EXPECT_NEAR(r.estimates[1].Gamma_over_delta, 2.5e-5 / (2.0 * kPi), 1e-18);
    for (const auto& e : r.estimates) {
        EXPECT_FALSE(e.matches_claim);
        EXPECT_NEAR(e.infidelity, e.thermal_term + e.dephasing_term, 1e-15);
    }
    EXPECT_NEAR(r.gamma_over_delta_stated, 2.5e-3, 1e-15);
    EXPECT_NEAR(r.gamma_over_delta_from_q, 1e6 / 4e3 / 4e6, 1e-15);
    EXPECT_GE(r.flags.size(), 2u);
}
