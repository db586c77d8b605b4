#pragma once

// Closed-form reduced dynamics of the protected two-spin qubit and the
// infidelity budget of the entangling gate. Everything here is evaluated in
// units of delta unless ClosedFormParams::delta says otherwise.

#include <string>
#include <vector>

#include "phonongate/hilbert.hpp"
#include "phonongate/model.hpp"

namespace phonongate::analytic {

struct ClosedFormParams {
    double alpha = 0.0;
    double delta = 1.0;
    double nbar = 0.0;
    double Gamma = 0.0;
    double gamma = 0.0;

    static ClosedFormParams from(const model::SystemParams& p);

    double q() const noexcept { return nbar / (nbar + 1.0); }
    double gbar() const noexcept { return model::effective_rabi_frequency(alpha, delta); }
    /// tau = 2 pi / gbar
    double rabi_period() const;

    /// Throws ParameterError unless 0 < alpha <= 0.2, nbar >= 0 and rates >= 0.
    void validate() const;
};

double coherence_C(double t, const ClosedFormParams& p);
double coherence_S(double t, const ClosedFormParams& p);

/// F(t) = 1/2 + C(t), population of |0> without dissipation.
double fidelity_F(double t, const ClosedFormParams& p);

/// F(t) by direct summation of sum_n (1-q) q^n cos^2(f(n) delta t).
double fidelity_F_bruteforce(double t, const ClosedFormParams& p, int terms);

double fidelity_spin_dephasing(double t, const ClosedFormParams& p);

/// Two-spin reduced state under spin dephasing in the spin1 (x) spin2 product
/// basis. Weights on |G>, |E> are (1 - e^{-2 Gamma t})/4 each; the state has
/// unit trace for every t.
Matrix reduced_state_spin_dephasing(double t, const ClosedFormParams& p);

/// Constants of the "+" eta family of the mechanical-damping Liouvillian.
struct DampingConstants {
    cplx A;
    cplx B;
    cplx xi;
    cplx y;
    bool root_flipped;  ///< true when the principal root gave a growing mode
};

/// sign = +1 or -1 selects the eta_{+} or eta_{-} family. Requires gamma > 0.
DampingConstants damping_constants(const ClosedFormParams& p, int sign = +1);

/// Lambda_{eta,+,n} = i gbar - n gamma (A + 2 xi) - gamma (xi - 1).
cplx eta_eigenvalue(const ClosedFormParams& p, const DampingConstants& k, int n, int sign = +1);

cplx Y_function(double t, const ClosedFormParams& p);
cplx Y_function(double t, const ClosedFormParams& p, const DampingConstants& k);

double fidelity_mech(double t, const ClosedFormParams& p);
double coherence_mech(double t, const ClosedFormParams& p);

/// 1/2 P + Re{Y} sz/2 - Im{Y} sy/2 embedded in the 4x4 product basis.
Matrix reduced_state_mech(double t, const ClosedFormParams& p);

double infidelity_thermal(double nbar, double alpha);
double infidelity_unprotected(double nbar);
/// Thermal term plus pi Gamma / ((alpha^2 - 2 alpha^4) delta).
double infidelity_total(const ClosedFormParams& p);

// ------------------------------------------------------ feasibility estimate

/// Physical parameters of a device in SI-like units (Hz).
struct DeviceParams {
    double nu_hz = 1.0e6;         ///< nu / 2 pi
    double g_hz = 100.0e3;        ///< g / 2 pi
    double delta_hz = 4.0e6;      ///< delta / 2 pi
    double gamma_hz = 10.0e3;     ///< gamma / 2 pi
    double Gamma_hz = 100.0;      ///< Gamma, see GammaUnit
    double quality_factor = 4.0e3;
    double nbar = 10.0;
    double claimed_fidelity = 0.94;
};

enum class GammaUnit {
    Angular,   ///< Gamma = 2 pi * Gamma_hz
    Ordinary,  ///< Gamma = Gamma_hz in s^-1
};

struct FeasibilityEstimate {
    GammaUnit unit;
    double alpha;
    double Gamma_over_delta;
    double thermal_term;
    double dephasing_term;
    double infidelity;
    double fidelity;
    bool matches_claim;  ///< |fidelity - claimed| <= 0.01
};

struct FeasibilityReport {
    std::vector<FeasibilityEstimate> estimates;  ///< angular then ordinary
    double gamma_over_delta_stated;              ///< from gamma_hz
    double gamma_over_delta_from_q;              ///< nu / Q
    std::vector<std::string> flags;
};

FeasibilityReport feasibility(const DeviceParams& d);

}  // namespace phonongate::analytic
