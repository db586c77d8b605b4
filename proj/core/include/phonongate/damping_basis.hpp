#pragma once

// Damping-basis (biorthogonal eigenelement) solutions of the effective
// protected-qubit Liouvillian with either spin dephasing or mechanical damping.
//
// All operators live on [spin1:2, spin2:2, osc:N]. The mechanical eta family
// uses normal-ordered Laguerre expressions; their Fock-diagonal matrix
// elements are generated by a three-term recurrence in n.

#include <vector>

#include "phonongate/analytic.hpp"
#include "phonongate/dynamics.hpp"
#include "phonongate/hilbert.hpp"

namespace phonongate::dampingbasis {

using analytic::ClosedFormParams;
using analytic::DampingConstants;

enum class Family {
    Dephasing1,
    DephasingZ,
    DephasingPlus,
    DephasingMinus,
    MuPlus,
    MuMinus,
    EtaPlus,
    EtaMinus,
};

const char* to_string(Family f);

struct EigenElement {
    cplx eigenvalue;
    Operator right;
    Operator left;
    Family family;
    int n = 0;
};

// -------------------------------------------------------------- dephasing

std::vector<EigenElement> dephasing_eigensystem(const ClosedFormParams& p, int fock, int n_max);

struct DephasingCoefficients {
    int n;
    double c1;
    double cz;
    double c_plus;
    double c_minus;
};

/// Overlaps of mu_th |0><0| with the left elements, n = 0..n_max.
std::vector<DephasingCoefficients> dephasing_coefficients(double nbar, int n_max);

/// Reduced two-spin state sum_{n<=n_max, j} c_{n,j} e^{lambda_{n,j} t} Tr_osc{...}.
/// Throws TruncationError if the thermal weight beyond n_max exceeds 1e-12.
Matrix dephasing_propagate(double t, const ClosedFormParams& p, int n_max);

/// Full spins (x) oscillator state from the same expansion on N Fock levels.
Matrix dephasing_state(double t, const ClosedFormParams& p, int fock);

// ---------------------------------------------------- normal-ordered Laguerre

/// Diagonal of :L_n(c a^dagger a) e^{-s a^dagger a}: on |0>..|length-1>,
/// via the recurrence in n.
Vector laguerre_diagonal(int n, cplx c, cplx s, int length);

/// Same diagonal from the explicit normal-ordered power sum (reference).
Vector laguerre_diagonal_explicit(int n, cplx c, cplx s, int length);

// ------------------------------------------------------ mechanical damping

/// Normalisation of eta_{+,n}: (A+2xi)(nbar+1-xi)/(nbar(nbar+1)) [(nbar+1-xi)/(nbar+1+A+xi)]^n.
cplx eta_prefactor(const ClosedFormParams& p, const DampingConstants& k, int n);

Vector eta_right_diagonal(const ClosedFormParams& p, const DampingConstants& k, int n, int length);
Vector eta_left_diagonal(const ClosedFormParams& p, const DampingConstants& k, int n, int length);

/// Damped-oscillator eigenelements (the eta construction at alpha = 0).
Vector mu_right_diagonal(double nbar, int n, int length);
Vector mu_left_diagonal(double nbar, int n, int length);

/// Action of the reduced mechanical superoperator K on a Fock-diagonal operator.
Vector apply_K(const Vector& diag, const ClosedFormParams& p, int sign = +1);

/// Eigenvalue of K on eta_{+,n}: Lambda_{eta,+,n} - i gbar + gamma nbar.
cplx k_eigenvalue(const ClosedFormParams& p, const DampingConstants& k, int n);

/// Sum over Fock levels of left_m * right_n, extended until converged.
/// Independent of any operator truncation.
cplx eta_overlap(const ClosedFormParams& p, const DampingConstants& k, int m, int n);
cplx mu_overlap(double nbar, int m, int n);

/// Trace of eta_{+,n} over the untruncated Fock space.
cplx eta_trace(const ClosedFormParams& p, const DampingConstants& k, int n);

/// Expansion coefficient of mu_th |0><0| on eta_{+,n}: [-(A+xi)/xi]^n / xi.
cplx eta_coefficient(const DampingConstants& k, int n);

/// mu-family (n <= n_max) and eta-family (n <= n_max) elements on N levels.
/// Requires gamma > 0 and nbar > 0.
std::vector<EigenElement> damping_eigensystem(const ClosedFormParams& p, int fock, int n_max);

struct DampingPropagation {
    Matrix series;       ///< reduced 4x4 from the eta series
    Matrix closed_form;  ///< reduced 4x4 from Y(t)
    cplx Y_series;
    cplx Y_closed;
    int terms = 0;
    double difference = 0.0;  ///< max entry |series - closed_form|
};

/// Sums the eta series until the relative term size drops below 1e-12 (or
/// n_max terms) and checks it against the closed form to `tolerance`.
/// Throws ConvergenceError on a non-decaying series or a mismatch.
DampingPropagation damping_propagate(double t, const ClosedFormParams& p, int n_max = 400,
                                     double tolerance = 1e-8);

/// Full-state reconstruction mu_th/2 + {sum_n c_n e^{Lambda t} rho_eta + h.c.}
/// on N Fock levels (n_max eta terms).
Matrix damping_state(double t, const ClosedFormParams& p, int fock, int n_max);

// ------------------------------------------------------- dense oracle

/// Matrix of the Lindblad generator on the invariant sector spanned by
/// |s><s'| (x) |m><m|, columns ordered (s, s', m) with m fastest. Throws
/// ModelError if the generator leaks out of the sector.
Matrix fock_diagonal_liouvillian(const dynamics::LindbladGenerator& gen);

Eigen::VectorXcd fock_diagonal_spectrum(const dynamics::LindbladGenerator& gen);

/// Distance from `value` to the nearest entry of `spectrum`.
double spectral_distance(const Eigen::VectorXcd& spectrum, cplx value);

}  // namespace phonongate::dampingbasis
