#include "phonongate/analytic.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "phonongate/errors.hpp"

namespace phonongate::analytic {

using std::numbers::pi;

ClosedFormParams ClosedFormParams::from(const model::SystemParams& p) {
    p.require_symmetric();
    return {p.alpha, p.delta.front(), p.nbar, p.Gamma, p.gamma};
}

double ClosedFormParams::rabi_period() const {
    const double g = gbar();
    if (!(g > 0.0)) throw ParameterError("effective Rabi frequency must be positive");
    return 2.0 * pi / g;
}

void ClosedFormParams::validate() const {
    if (!(alpha > 0.0 && alpha <= 0.2)) throw ParameterError("alpha must lie in (0, 0.2]");
    if (!(delta > 0.0)) throw ParameterError("delta must be positive");
    if (!(nbar >= 0.0)) throw ParameterError("nbar must be >= 0");
    if (!(Gamma >= 0.0) || !(gamma >= 0.0)) throw ParameterError("decay rates must be >= 0");
}

namespace {

struct Kernel {
    double re;
    double im;
};

// sum_n (1-q) q^n exp(2 i f(n) delta t)
Kernel thermal_phase_sum(double t, const ClosedFormParams& p) {
    const double q = p.q();
    const double a2 = p.alpha * p.alpha;
    const double a4 = a2 * a2;
    const double slow = 2.0 * (a2 + 2.0 * a4) * p.delta * t;
    const double den = 1.0 - 2.0 * q * std::cos(8.0 * a4 * p.delta * t) + q * q;
    const double gt = p.gbar() * t;
    return {(1.0 - q) * (std::cos(gt) - q * std::cos(slow)) / den,
            (1.0 - q) * (std::sin(gt) - q * std::sin(slow)) / den};
}

Matrix protected_embedding(double p0, double p1, double pg, double pe, cplx c01) {
    const auto& ps = model::protected_subspace();
    Matrix rho = p0 * ps.zero * ps.zero.adjoint() + p1 * ps.one * ps.one.adjoint() +
                 pg * ps.ground * ps.ground.adjoint() + pe * ps.excited * ps.excited.adjoint();
    rho += c01 * ps.zero * ps.one.adjoint();
    rho += std::conj(c01) * ps.one * ps.zero.adjoint();
    return rho;
}

}  // namespace

double coherence_C(double t, const ClosedFormParams& p) { return 0.5 * thermal_phase_sum(t, p).re; }

double coherence_S(double t, const ClosedFormParams& p) { return -0.5 * thermal_phase_sum(t, p).im; }

double fidelity_F(double t, const ClosedFormParams& p) { return 0.5 + coherence_C(t, p); }

double fidelity_F_bruteforce(double t, const ClosedFormParams& p, int terms) {
    const auto w = model::thermal_weights(p.nbar, terms);
    double f = 0.0;
    for (int n = terms - 1; n >= 0; --n) {
        const double c = std::cos(model::protected_rate(p.alpha, n) * p.delta * t);
        f += w[static_cast<std::size_t>(n)] * c * c;
    }
    return f;
}

double fidelity_spin_dephasing(double t, const ClosedFormParams& p) {
    return 0.25 * (1.0 + std::exp(-2.0 * p.Gamma * t)) + std::exp(-p.Gamma * t) * coherence_C(t, p);
}

Matrix reduced_state_spin_dephasing(double t, const ClosedFormParams& p) {
    const double e2 = std::exp(-2.0 * p.Gamma * t);
    const double e1 = std::exp(-p.Gamma * t);
    const double c = coherence_C(t, p);
    const double s = coherence_S(t, p);
    const double outside = 0.25 * (1.0 - e2);
    // C sz + S sy: <0|.|1> = -i S
    return protected_embedding(0.25 * (1.0 + e2) + e1 * c, 0.25 * (1.0 + e2) - e1 * c, outside, outside,
                               -kI * (e1 * s));
}

DampingConstants damping_constants(const ClosedFormParams& p, int sign) {
    if (!(p.gamma > 0.0)) throw DomainError("mechanical-damping constants require gamma > 0");
    if (sign != 1 && sign != -1) throw ParameterError("family sign must be +1 or -1");
    const double a4 = std::pow(p.alpha, 4);
    const double sg = static_cast<double>(sign);
    DampingConstants k{};
    k.A = cplx(-p.gamma, sg * 8.0 * a4 * p.delta) / p.gamma;
    k.B = cplx(0.0, sg * 8.0 * a4 * (p.nbar + 1.0) * p.delta) / p.gamma;
    const cplx root = std::sqrt(k.A * k.A + 4.0 * k.B);
    k.xi = (root - k.A) / 2.0;
    k.root_flipped = false;
    for (int n = 0; n <= 10; ++n) {
        if (eta_eigenvalue(p, k, n, sign).real() > 1e-12 * p.gamma) {
            k.xi = (-root - k.A) / 2.0;
            k.root_flipped = true;
            break;
        }
    }
    for (int n = 0; n <= 10; ++n) {
        if (eta_eigenvalue(p, k, n, sign).real() > 1e-12 * p.gamma) {
            throw ConvergenceError("no square-root branch gives decaying eta eigenvalues");
        }
    }
    const double n1 = p.nbar + 1.0;
    k.y = 2.0 * (n1 + k.A + k.xi) * k.xi * k.xi / (n1 * (k.A + 2.0 * k.xi));
    return k;
}

cplx eta_eigenvalue(const ClosedFormParams& p, const DampingConstants& k, int n, int sign) {
    return kI * (static_cast<double>(sign) * p.gbar()) - static_cast<double>(n) * p.gamma * (k.A + 2.0 * k.xi) -
           p.gamma * (k.xi - 1.0);
}

cplx Y_function(double t, const ClosedFormParams& p) { return Y_function(t, p, damping_constants(p, +1)); }

cplx Y_function(double t, const ClosedFormParams& p, const DampingConstants& k) {
    if (!(p.gamma > 0.0)) throw DomainError("Y(t) requires gamma > 0; use fidelity_F for gamma = 0");
    // Multiply numerator and denominator by e^{-X} so that large gamma t stays finite.
    const cplx x = (k.A + 2.0 * k.xi) * (p.gamma * t / 2.0);
    const cplx e2 = std::exp(-2.0 * x);
    const cplx num = std::exp(cplx(p.gamma / 2.0, 2.0 * p.alpha * p.alpha * p.delta) * t - x);
    const cplx den = e2 + k.y * (1.0 - e2) / 2.0;
    return num / den;
}

double fidelity_mech(double t, const ClosedFormParams& p) { return 0.5 + 0.5 * Y_function(t, p).real(); }

double coherence_mech(double t, const ClosedFormParams& p) { return -0.5 * Y_function(t, p).imag(); }

Matrix reduced_state_mech(double t, const ClosedFormParams& p) {
    const cplx y = Y_function(t, p);
    return protected_embedding(0.5 + 0.5 * y.real(), 0.5 - 0.5 * y.real(), 0.0, 0.0, kI * (0.5 * y.imag()));
}

double infidelity_thermal(double nbar, double alpha) {
    if (!(nbar >= 0.0)) throw ParameterError("nbar must be >= 0");
    return 16.0 * pi * pi * nbar * (2.0 * nbar + 1.0) * std::pow(alpha, 4);
}

double infidelity_unprotected(double nbar) {
    if (!(nbar >= 0.0)) throw ParameterError("nbar must be >= 0");
    return nbar / (2.0 * nbar + 1.0);
}

double infidelity_total(const ClosedFormParams& p) {
    const double a2 = p.alpha * p.alpha;
    return infidelity_thermal(p.nbar, p.alpha) + pi * p.Gamma / ((a2 - 2.0 * a2 * a2) * p.delta);
}

FeasibilityReport feasibility(const DeviceParams& d) {
    if (!(d.delta_hz > 0.0) || !(d.g_hz > 0.0)) throw ParameterError("device frequencies must be positive");
    FeasibilityReport r;
    const double alpha = d.g_hz / d.delta_hz;
    const double delta_angular = 2.0 * pi * d.delta_hz;
    for (auto unit : {GammaUnit::Angular, GammaUnit::Ordinary}) {
        const double Gamma = unit == GammaUnit::Angular ? 2.0 * pi * d.Gamma_hz : d.Gamma_hz;
        ClosedFormParams p{alpha, 1.0, d.nbar, Gamma / delta_angular, 0.0};
        FeasibilityEstimate e{};
        e.unit = unit;
        e.alpha = alpha;
        e.Gamma_over_delta = p.Gamma;
        e.thermal_term = infidelity_thermal(d.nbar, alpha);
        e.infidelity = infidelity_total(p);
        e.dephasing_term = e.infidelity - e.thermal_term;
        e.fidelity = 1.0 - e.infidelity;
        e.matches_claim = std::abs(e.fidelity - d.claimed_fidelity) <= 0.01;
        r.estimates.push_back(e);
    }
    r.gamma_over_delta_stated = d.gamma_hz / d.delta_hz;
    r.gamma_over_delta_from_q = (d.nu_hz / d.quality_factor) / d.delta_hz;

    for (const auto& e : r.estimates) {
        if (!e.matches_claim) {
            std::ostringstream os;
            os << "infidelity budget with " << (e.unit == GammaUnit::Angular ? "angular" : "ordinary")
               << " Gamma gives fidelity " << e.fidelity << ", not the claimed " << d.claimed_fidelity;
            r.flags.push_back(os.str());
        }
    }
    if (std::abs(r.gamma_over_delta_stated - r.gamma_over_delta_from_q) > 1e-3 * r.gamma_over_delta_stated) {
        std::ostringstream os;
        os << "stated gamma/2pi = " << d.gamma_hz << " Hz differs from nu/Q = " << d.nu_hz / d.quality_factor
           << " Hz";
        r.flags.push_back(os.str());
    }
    return r;
}

}  // namespace phonongate::analytic
