#pragma once

// Two logical qubits on four three-level spins, each logical qubit encoded in
// {|0>_jk = |->_j |+>_k, |A>_jk = |a>_j |a>_k}, entangled by an engineered
// flip-flop between spins 2 and 3 in the dispersive effective model.
//
// Spin levels: 0 = |+>, 1 = |->, 2 = |a>. Four-spin vectors are 81-dim in
// spin1 (x) spin2 (x) spin3 (x) spin4 order (spins are 1-based in labels and
// 0-based in arrays).

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "phonongate/hilbert.hpp"

namespace phonongate::gate {

inline constexpr int kLevelPlus = 0;
inline constexpr int kLevelMinus = 1;
inline constexpr int kLevelAux = 2;
inline constexpr int kSpins = 4;
inline constexpr int kFullDim = 81;
inline constexpr int kSectorDim = 25;

/// Single-spin three-level operators.
namespace ops3 {
Matrix sigma_z();      ///< diag(1, -1, 0)
Matrix sigma_plus();   ///< |+><-|
Matrix sigma_minus();
Matrix sigma_x();      ///< |+><-| + |-><+|
Matrix aux_projector();
/// {|+>, |->, |a>} in the {|e>, |g>, |a>} basis, columns are the new states.
Matrix basis_exchange();
}  // namespace ops3

struct LogicalQubit {
    std::array<int, 2> pair;  ///< 0-based physical spin indices (j, k)

    Vector zero() const;  ///< |->_j |+>_k (others |a>)
    Vector aux() const;   ///< |a>_j |a>_k (others |a>)
};

/// Product of single-spin levels as an 81-dim basis vector.
Vector product_state(const std::array<int, kSpins>& levels);

/// Two-logical-qubit state sum c_{xy} |x>_12 |y>_34 with x, y in {0, A}.
Vector logical_state(cplx c00, cplx c0A, cplx cA0, cplx cAA);

/// 81 x 25 isometry onto the sector where each pair is in {+,-}^2 or |aa>.
const Matrix& sector_isometry();

struct GateConfig {
    double alpha = 1.0 / 40.0;
    double delta = 1.0;
    double nbar = 2.0;
    std::array<double, kSpins> DeltaBar{};   ///< ac Stark shifts
    std::array<bool, kSpins> driven{true, true, true, true};
    double min_ratio = 20.0;                 ///< required min |DeltaBar_j - DeltaBar_k| / gbar
    int fock = 0;                            ///< 0 selects the thermal-tail cutoff

    /// DeltaBar = {m gbar, 0, 0, -m gbar}, m = detuning_multiple.
    static GateConfig standard(double alpha, double nbar, double detuning_multiple = 80.0);

    double gbar() const;
    double tau() const;
    int fock_levels() const;
    /// gbar / min |DeltaBar_j - DeltaBar_k| over driven pairs other than (2,3).
    double suppression_ratio() const;
    /// Throws ConfigError if the suppression ratio exceeds 1/min_ratio or if
    /// spins 2 and 3 are driven at different shifts.
    void validate() const;
};

/// Effective Hamiltonian of the four spins for oscillator Fock level n,
/// restricted to the 25-dim sector.
Matrix sector_hamiltonian(const GateConfig& config, int n);

/// Same on the full 81-dim space (used to check sector invariance).
Matrix full_hamiltonian(const GateConfig& config, int n);

struct GateNoise {
    double Gamma = 0.0;
    double gamma = 0.0;
    /// Fock levels for the joint spins (x) oscillator run when gamma > 0.
    int damping_fock = 12;
    /// Upper bound on the joint dimension 25 * damping_fock.
    int dimension_budget = 400;
    /// Observable tolerance handed to the integrator.
    double tolerance = 1e-6;
    /// Per-Fock runs skip thermal weights below this and renormalise.
    double weight_floor = 1e-6;
};

struct GateResult {
    double fidelity = 0.0;
    cplx amplitude;               ///< sum_n p_n <target|U_n|in> (noise-free runs only)
    Matrix sector_state;          ///< 25 x 25 spin state at tau
    std::string method;
    int fock_levels = 0;
    std::vector<std::string> warnings;
};

/// Evolves `initial` (81-dim, inside the sector) for tau = 2 pi / gbar and
/// reports the overlap with `target`.
GateResult run_gate(const GateConfig& config, const Vector& initial, const Vector& target,
                    const std::optional<GateNoise>& noise = std::nullopt);

struct TruthTableLine {
    std::string label;
    Vector input;
    Vector ideal;
    GateResult result;
};

/// The four logical basis inputs with their ideal images.
std::vector<TruthTableLine> truth_table(const GateConfig& config,
                                       const std::optional<GateNoise>& noise = std::nullopt);

/// 4 x 4 logical-basis amplitudes <x'y'|U_n|xy> at Fock level n.
Matrix logical_amplitudes(const GateConfig& config, int n);

/// (|0>+|A>)(|0>+|A>)/2 and its image (|0>(|A>-|0>) + |A>(|A>+|0>))/2.
Vector entangling_input();
Vector entangling_target();

// ------------------------------------------------------------- preparation

struct PreparationTrace {
    Vector after_step_i;    ///< |0>_jk
    Vector after_step_ii;   ///< (|0> + |1>)/sqrt 2
    Vector after_step_iii;  ///< (|e e> + |a a>)/sqrt 2 before the final e/g rotations
    Vector final_state;     ///< (|0> + |A>)/sqrt 2
};

/// Pair-space (9-dim) preparation from |a>|a> by ideal unitary steps.
PreparationTrace prepare_initial();

/// Re-expresses a 9-dim pair vector in the {|e>, |g>, |a>} basis.
Vector to_eg_basis(const Vector& pair_state);

/// Embeds a pair vector on spins (j, k) with the remaining spins in `rest`.
Vector embed_pair(const Vector& pair_state, std::array<int, 2> pair, const Vector& rest_pair_state);

// ------------------------------------------------------------- selectivity

struct SelectivityConfig {
    double alpha = 1.0 / 40.0;
    double nbar = 2.0;
    double delta = 1.0;
    double suppressed_shift = 1.0;  ///< DeltaBar_1 in the suppressed run (DeltaBar_2 = 0)
    double common_shift = 1.0;      ///< DeltaBar_1 = DeltaBar_2 in the common-shift run
    int fock = 0;
};

struct SelectivityResult {
    std::vector<double> times;
    std::vector<double> F_resonant;
    std::vector<double> F_suppressed;
    std::vector<double> F_common;
    double max_transfer_suppressed = 0.0;  ///< max_t (1 - F_suppressed)
};

/// Population of |0> for one driven spin pair under the effective model with
/// resonant, suppressed and common Stark shifts.
SelectivityResult selectivity_scan(const SelectivityConfig& config, std::span<const double> times);

// ------------------------------------------------------------- unprotected

struct UnprotectedOracle {
    double brute_force;
    double closed_form;
    std::vector<cplx> beta;  ///< beta_0, beta_1, ...
};

/// Single-spin encoding without the protected subspace. The phases beta_n are
/// accumulated under (alpha^2 delta / 2)(2n+1) S_z over tau = pi / (alpha^2 delta).
UnprotectedOracle unprotected_gate_oracle(double nbar, double alpha, int terms = 500);

}  // namespace phonongate::gate
