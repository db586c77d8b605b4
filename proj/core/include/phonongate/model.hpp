#pragma once

// Hamiltonians and initial states of driven two-level spins coupled to a
// single mechanical mode.
//
// Units: hbar = 1 and frequencies are expressed in units of the common
// pseudo-detuning delta unless a SystemParams instance says otherwise.
// Spin basis per factor: index 0 = |+>, index 1 = |->, the eigenstates of
// sigma_z in the Tavis-Cummings working frame.

#include <string>
#include <vector>

#include "phonongate/hilbert.hpp"

namespace phonongate::model {

inline constexpr int kPlus = 0;
inline constexpr int kMinus = 1;
inline const std::string kOscLabel = "osc";

std::string spin_label(int k);  // 1-based: "spin1", "spin2", ...

/// [spin1:2, ..., spinK:2, osc:N]
SpaceLayout spin_oscillator_layout(int n_spins, int fock);

struct SystemParams {
    double nu = 0.0;                ///< oscillator frequency
    std::vector<double> g;          ///< spin-oscillator couplings g_k
    std::vector<double> delta;      ///< pseudo-detunings delta_k = Omega_k - nu
    std::vector<double> omega;      ///< Rabi frequencies Omega_k
    std::vector<double> Delta;      ///< drive detunings Delta_k
    std::vector<double> DeltaBar;   ///< ac Stark shifts Delta_k^2 / (2 Omega_k)
    double alpha = 0.0;             ///< g / delta in the symmetric case
    double nbar = 0.0;              ///< mean thermal occupation
    double Gamma = 0.0;             ///< spin dephasing rate
    double gamma = 0.0;             ///< mechanical damping rate
    bool symmetric = false;

    /// Uniform couplings g_k = alpha, delta_k = 1, resonant drives (Delta_k = 0).
    static SystemParams symmetric_spins(double alpha, double nbar, int n_spins = 2, double nu = 0.0);

    std::size_t n_spins() const noexcept { return g.size(); }
    double q() const noexcept { return nbar / (nbar + 1.0); }
    /// Effective Rabi frequency 2 (alpha^2 - 2 alpha^4) delta.
    double gbar() const;

    /// Throws ParameterError on hard violations; returns soft warnings.
    std::vector<std::string> validate() const;
    /// Throws ModelError unless the symmetric-case relations hold.
    void require_symmetric() const;
};

/// Oscillator-mediated rate function f(x) = alpha^2 - 2 alpha^4 (2x + 1).
double protected_rate(double alpha, double x);

/// 2 (alpha^2 - 2 alpha^4) delta
double effective_rabi_frequency(double alpha, double delta = 1.0);

/// Flip-flop strength g_j g_k (delta_j + delta_k) / (2 delta_j delta_k).
double flip_flop_coupling(double g_j, double g_k, double delta_j, double delta_k);

// ------------------------------------------------------------------- states

/// Two-spin states in the spin1 (x) spin2 product basis and the operators of
/// the protected qubit {|0> = |->|+>, |1> = |+>|->}.
struct ProtectedSubspace {
    Vector zero;     ///< |0> = |->_1 |+>_2
    Vector one;      ///< |1> = |+>_1 |->_2
    Vector ground;   ///< |G> = |->_1 |->_2
    Vector excited;  ///< |E> = |+>_1 |+>_2
    Matrix sx;       ///< |1><0| + |0><1|
    Matrix sy;       ///< i|1><0| - i|0><1|
    Matrix sz;       ///< |0><0| - |1><1|
    Matrix projector;///< |0><0| + |1><1|
};

const ProtectedSubspace& protected_subspace();

/// Embeds a two-spin operator (4x4, spin1 (x) spin2) into the spins+osc layout.
Operator embed_two_spin(const SpaceLayout& layout, const Matrix& two_spin);

struct ThermalState {
    DensityOperator rho;  ///< on [osc:N]
    double tail;          ///< q^N, the weight outside the truncation
    bool renormalized;    ///< true when the tail exceeded 1e-10
};

/// Diagonal (1-q) q^n on |0>..|N-1>.
ThermalState thermal_state(double nbar, int fock);
std::vector<double> thermal_weights(double nbar, int count);

/// Smallest N with q^N < tail_tol.
int fock_cutoff(double nbar, double tail_tol = 1e-10);

/// mu_th (x) |psi><psi| on the spins+osc layout, spins first.
DensityOperator thermal_product_state(const SpaceLayout& layout, const Vector& spin_state, double nbar);

// ------------------------------------------------------------- Hamiltonians

struct CollectiveOperators {
    Operator Sz, Splus, Sminus;  ///< sums of sigma_z, sigma_+, sigma_-
    Operator Jplus, Jminus;      ///< a S+ +- a^dagger S-
    Operator a, adag, number;
};

CollectiveOperators collective_operators(const SpaceLayout& layout);

enum class Frame {
    Drive,       ///< rotating with the drive: the Tavis-Cummings form as written
    Oscillator,  ///< additionally rotating at nu: delta_k sigma_z/2 + g_k (a s+ + h.c.)
};

Operator tavis_cummings(const SystemParams& params, int fock, Frame frame = Frame::Drive);

/// Spin-oscillator Hamiltonian before the basis exchange and the rotating-wave
/// approximation, written in the {|e>, |g>} basis (validation only).
Operator lab_hamiltonian(const SystemParams& params, int fock);

/// Single-spin basis change {|e>,|g>} -> {|+>,|->}; columns are |+>, |->.
Matrix basis_exchange();

/// Terms g_k (a sigma_- + a^dagger sigma_+) dropped by the rotating-wave step.
Operator counter_rotating_terms(const SystemParams& params, int fock);

/// Second-order dispersive Hamiltonian with per-spin Stark shifts DeltaBar_k,
/// phonon-number dependent shifts and pairwise flip-flop terms.
Operator heff_second_order(const SystemParams& params, int fock);

/// Symmetric second order: alpha^2 delta [(2n+1) S_z / 2 + flip-flop].
Operator heff_second_order_symmetric(const SystemParams& params, int fock);

/// Fourth-order protected-subspace correction -2 alpha^4 delta (2n+1) flip-flop.
Operator heff_fourth_order(const SystemParams& params, int fock);

/// delta f(a^dagger a) sx on span{|0>,|1>} (x) Fock; zero on |G>, |E>.
Operator heff_protected(const SystemParams& params, int fock);

// ------------------------------------------------------- dispersive transform

/// Terms of exp(alpha J-) H exp(-alpha J-) grouped by their power of alpha.
/// The diagonal part of H counts as order zero and the spin-oscillator exchange
/// part (already proportional to alpha) as order one.
struct DispersiveExpansion {
    std::vector<Operator> by_order;  ///< by_order[k] collects the alpha^k terms
    Operator total;                  ///< sum over k <= order
    double first_order_norm;         ///< ||by_order[1]||_F, zero for the canonical form
};

DispersiveExpansion dispersive_expansion(const Operator& hamiltonian, const SystemParams& params, int order);

/// Sum of the expansion up to `order` (2 <= order <= 6). Throws ModelError if
/// the first-order terms do not cancel to 1e-12.
Operator dispersive_transform(const Operator& hamiltonian, const SystemParams& params, int order);

/// n-th order term alpha^n delta (n-1)/n! [J-, J+]_{n-1}.
Operator nth_order_effective(const SystemParams& params, int fock, int n);

/// exp(alpha J-) as a unitary matrix on the spins+osc layout.
Matrix dispersive_unitary(const SystemParams& params, int fock);

// ----------------------------------------------------------------- utilities

/// sum_n x^n e^{iny} = (1 - x e^{-iy}) / (1 - 2x cos y + x^2), |x| < 1.
cplx geometric_kernel(double x, double y);

}  // namespace phonongate::model
