#include "phonongate/model.hpp"

#include <cmath>
#include <sstream>

#include "phonongate/errors.hpp"

namespace phonongate::model {

namespace {

bool close(double a, double b, double rel = 1e-12) {
    return std::abs(a - b) <= rel * std::max({std::abs(a), std::abs(b), 1e-300});
}

Operator nested_commutator(const Operator& x, Operator y, int n) {
    for (int i = 0; i < n; ++i) y = commutator(x, y);
    return y;
}

double factorial(int n) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

std::vector<std::string> spin_labels_of(const SpaceLayout& layout) {
    std::vector<std::string> labels;
    for (const auto& f : layout.factors()) {
        if (f.label.rfind("spin", 0) == 0) {
            if (f.dim != 2) throw LayoutError("two-level spin factor '" + f.label + "' must have dimension 2");
            labels.push_back(f.label);
        }
    }
    if (labels.empty()) throw LayoutError("layout has no spin factors: " + layout.describe());
    if (!layout.contains(kOscLabel)) throw LayoutError("layout has no oscillator factor: " + layout.describe());
    return labels;
}

void check_lengths(const SystemParams& p) {
    const auto k = p.g.size();
    if (k == 0) throw ParameterError("at least one spin is required");
    if (p.delta.size() != k || p.omega.size() != k || p.Delta.size() != k || p.DeltaBar.size() != k) {
        throw ParameterError("per-spin parameter lists must all have the same length");
    }
}

}  // namespace

std::string spin_label(int k) { return "spin" + std::to_string(k); }

SpaceLayout spin_oscillator_layout(int n_spins, int fock) {
    std::vector<Factor> factors;
    for (int k = 1; k <= n_spins; ++k) factors.push_back({spin_label(k), 2});
    factors.push_back({kOscLabel, fock});
    return SpaceLayout(std::move(factors));
}

// ------------------------------------------------------------- SystemParams

SystemParams SystemParams::symmetric_spins(double alpha, double nbar, int n_spins, double nu) {
    SystemParams p;
    p.nu = nu;
    p.alpha = alpha;
    p.nbar = nbar;
    p.symmetric = true;
    const auto k = static_cast<std::size_t>(n_spins);
    p.g.assign(k, alpha);
    p.delta.assign(k, 1.0);
    p.omega.assign(k, nu + 1.0);
    p.Delta.assign(k, 0.0);
    p.DeltaBar.assign(k, 0.0);
    return p;
}

double SystemParams::gbar() const {
    const double d = delta.empty() ? 1.0 : delta.front();
    return effective_rabi_frequency(alpha, d);
}

std::vector<std::string> SystemParams::validate() const {
    check_lengths(*this);
    if (!(nbar >= 0.0)) throw ParameterError("nbar must be >= 0");
    if (!(Gamma >= 0.0)) throw ParameterError("Gamma must be >= 0");
    if (!(gamma >= 0.0)) throw ParameterError("gamma must be >= 0");
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (!close(delta[k], omega[k] - nu, 1e-9) ) {
            std::ostringstream os;
            os << "delta_" << k + 1 << " = " << delta[k] << " differs from Omega - nu = " << omega[k] - nu;
            throw ParameterError(os.str());
        }
        if (delta[k] == 0.0) throw ParameterError("pseudo-detuning must be non-zero");
    }
    if (symmetric) require_symmetric();
    std::vector<std::string> warnings;
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (std::abs(g[k] / delta[k]) > 0.2) {
            std::ostringstream os;
            os << "g/delta = " << g[k] / delta[k] << " for spin " << k + 1 << " exceeds the dispersive bound 0.2";
            warnings.push_back(os.str());
        }
    }
    return warnings;
}

void SystemParams::require_symmetric() const {
    check_lengths(*this);
    for (std::size_t k = 1; k < g.size(); ++k) {
        if (!close(g[k], g[0]) || !close(delta[k], delta[0])) {
            throw ModelError("symmetric builder requires g_k = g and delta_k = delta for all spins");
        }
    }
    if (!close(alpha, g[0] / delta[0])) throw ModelError("alpha must equal g / delta in the symmetric case");
}

double protected_rate(double alpha, double x) {
    const double a2 = alpha * alpha;
    return a2 - 2.0 * a2 * a2 * (2.0 * x + 1.0);
}

double effective_rabi_frequency(double alpha, double delta) {
    const double a2 = alpha * alpha;
    return 2.0 * (a2 - 2.0 * a2 * a2) * delta;
}

double flip_flop_coupling(double g_j, double g_k, double delta_j, double delta_k) {
    return g_j * g_k * (delta_j + delta_k) / (2.0 * delta_j * delta_k);
}

// ------------------------------------------------------------------- states

const ProtectedSubspace& protected_subspace() {
    static const ProtectedSubspace ps = [] {
        ProtectedSubspace s;
        auto idx = [](int s1, int s2) { return s1 * 2 + s2; };
        s.zero = ops::basis(4, idx(kMinus, kPlus));
        s.one = ops::basis(4, idx(kPlus, kMinus));
        s.ground = ops::basis(4, idx(kMinus, kMinus));
        s.excited = ops::basis(4, idx(kPlus, kPlus));
        s.sx = s.one * s.zero.adjoint() + s.zero * s.one.adjoint();
        s.sy = kI * s.one * s.zero.adjoint() - kI * s.zero * s.one.adjoint();
        s.sz = s.zero * s.zero.adjoint() - s.one * s.one.adjoint();
        s.projector = s.zero * s.zero.adjoint() + s.one * s.one.adjoint();
        return s;
    }();
    return ps;
}

Operator embed_two_spin(const SpaceLayout& layout, const Matrix& two_spin) {
    if (two_spin.rows() != 4 || two_spin.cols() != 4) throw LayoutError("two-spin operator must be 4x4");
    if (layout.size() != 3 || layout.factor(0).label != spin_label(1) || layout.factor(1).label != spin_label(2) ||
        layout.factor(2).label != kOscLabel) {
        throw LayoutError("embed_two_spin expects [spin1, spin2, osc], got " + layout.describe());
    }
    const int n = layout.factor(2).dim;
    return Operator(layout, ops::kron(two_spin, ops::identity(n)));
}

std::vector<double> thermal_weights(double nbar, int count) {
    if (!(nbar >= 0.0)) throw ParameterError("nbar must be >= 0");
    const double q = nbar / (nbar + 1.0);
    std::vector<double> w(static_cast<std::size_t>(count));
    double qn = 1.0;
    for (auto& x : w) {
        x = (1.0 - q) * qn;
        qn *= q;
    }
    return w;
}

ThermalState thermal_state(double nbar, int fock) {
    if (!(nbar >= 0.0)) throw ParameterError("nbar must be >= 0");
    if (fock < 1) throw ParameterError("Fock truncation must be >= 1");
    const double q = nbar / (nbar + 1.0);
    auto w = thermal_weights(nbar, fock);
    const double tail = std::pow(q, fock);
    const bool renormalize = tail > 1e-10;
    if (renormalize) {
        for (auto& x : w) x /= (1.0 - tail);
    }
    Matrix m = Matrix::Zero(fock, fock);
    for (int n = 0; n < fock; ++n) m(n, n) = w[static_cast<std::size_t>(n)];
    return {DensityOperator(Operator(SpaceLayout::single(kOscLabel, fock), std::move(m)), 1e-10), tail, renormalize};
}

int fock_cutoff(double nbar, double tail_tol) {
    if (!(nbar >= 0.0)) throw ParameterError("nbar must be >= 0");
    if (nbar == 0.0) return 1;
    const double q = nbar / (nbar + 1.0);
    int n = static_cast<int>(std::ceil(std::log(tail_tol) / std::log(q)));
    while (n > 1 && std::pow(q, n - 1) < tail_tol) --n;
    while (std::pow(q, n) >= tail_tol) ++n;
    return std::max(n, 1);
}

DensityOperator thermal_product_state(const SpaceLayout& layout, const Vector& spin_state, double nbar) {
    const auto& osc = layout.factor(layout.size() - 1);
    if (osc.label != kOscLabel) throw LayoutError("oscillator must be the last factor");
    const int spin_dim = layout.dim() / osc.dim;
    if (spin_state.size() != spin_dim) throw LayoutError("spin state dimension mismatch");
    const auto th = thermal_state(nbar, osc.dim);
    Matrix m = ops::kron(ops::projector(spin_state.normalized()), th.rho.matrix());
    return DensityOperator(Operator(layout, std::move(m)), std::max(1e-10, 2.0 * th.tail));
}

// ------------------------------------------------------------- Hamiltonians

CollectiveOperators collective_operators(const SpaceLayout& layout) {
    const auto labels = spin_labels_of(layout);
    const int n = layout.dim_of(kOscLabel);
    Operator sz = Operator::zero(layout), sp = Operator::zero(layout), sm = Operator::zero(layout);
    for (const auto& l : labels) {
        sz += embed(layout, l, ops::sigma_z());
        sp += embed(layout, l, ops::sigma_plus());
        sm += embed(layout, l, ops::sigma_minus());
    }
    Operator a = embed(layout, kOscLabel, ops::annihilation(n));
    Operator ad = embed(layout, kOscLabel, ops::creation(n));
    Operator num = embed(layout, kOscLabel, ops::number(n));
    Operator jp = a * sp + ad * sm;
    Operator jm = a * sp - ad * sm;
    return {sz, sp, sm, jp, jm, a, ad, num};
}

Operator tavis_cummings(const SystemParams& params, int fock, Frame frame) {
    (void)params.validate();
    const int k_spins = static_cast<int>(params.n_spins());
    const SpaceLayout layout = spin_oscillator_layout(k_spins, fock);
    const Matrix a = ops::annihilation(fock);
    const Matrix ad = ops::creation(fock);
    Operator h = Operator::zero(layout);
    for (int k = 0; k < k_spins; ++k) {
        const auto label = spin_label(k + 1);
        const auto ku = static_cast<std::size_t>(k);
        if (frame == Frame::Drive) {
            h += embed(layout, label, 0.5 * params.omega[ku] * ops::sigma_z());
            h += embed(layout, label, 0.5 * params.Delta[ku] * ops::sigma_x());
        } else {
            if (params.Delta[ku] != 0.0) {
                throw ModelError("the oscillator-rotating frame requires resonant drives (Delta_k = 0)");
            }
            h += embed(layout, label, 0.5 * params.delta[ku] * ops::sigma_z());
        }
        h += params.g[ku] * (embed(layout, {{label, ops::sigma_plus()}, {kOscLabel, a}}) +
                             embed(layout, {{label, ops::sigma_minus()}, {kOscLabel, ad}}));
    }
    if (frame == Frame::Drive) h += embed(layout, kOscLabel, params.nu * ops::number(fock));
    return h;
}

Matrix basis_exchange() {
    Matrix u(2, 2);
    const double r = 1.0 / std::sqrt(2.0);
    u << r, r, r, -r;
    return u;
}

Operator lab_hamiltonian(const SystemParams& params, int fock) {
    (void)params.validate();
    const int k_spins = static_cast<int>(params.n_spins());
    const SpaceLayout layout = spin_oscillator_layout(k_spins, fock);
    // {|e>, |g>} basis: sigma_z = |e><e| - |g><g|, sigma_x = |e><g| + |g><e|.
    const Matrix sz = ops::sigma_z();
    const Matrix sx = ops::sigma_x();
    const Matrix x = ops::annihilation(fock) + ops::creation(fock);
    Operator h = embed(layout, kOscLabel, params.nu * ops::number(fock));
    for (int k = 0; k < k_spins; ++k) {
        const auto label = spin_label(k + 1);
        const auto ku = static_cast<std::size_t>(k);
        h += embed(layout, label, 0.5 * params.Delta[ku] * sz + 0.5 * params.omega[ku] * sx);
        h += params.g[ku] * embed(layout, {{label, sz}, {kOscLabel, x}});
    }
    return h;
}

Operator counter_rotating_terms(const SystemParams& params, int fock) {
    const int k_spins = static_cast<int>(params.n_spins());
    const SpaceLayout layout = spin_oscillator_layout(k_spins, fock);
    Operator h = Operator::zero(layout);
    for (int k = 0; k < k_spins; ++k) {
        const auto label = spin_label(k + 1);
        h += params.g[static_cast<std::size_t>(k)] *
             (embed(layout, {{label, ops::sigma_minus()}, {kOscLabel, ops::annihilation(fock)}}) +
              embed(layout, {{label, ops::sigma_plus()}, {kOscLabel, ops::creation(fock)}}));
    }
    return h;
}

Operator heff_second_order(const SystemParams& params, int fock) {
    (void)params.validate();
    const int k_spins = static_cast<int>(params.n_spins());
    const SpaceLayout layout = spin_oscillator_layout(k_spins, fock);
    const Matrix two_n_plus_one = 2.0 * ops::number(fock) + ops::identity(fock);
    Operator h = Operator::zero(layout);
    for (int k = 0; k < k_spins; ++k) {
        const auto ku = static_cast<std::size_t>(k);
        const auto label = spin_label(k + 1);
        h += embed(layout, label, 0.5 * params.DeltaBar[ku] * ops::sigma_z());
        const double stark = params.g[ku] * params.g[ku] / (2.0 * params.delta[ku]);
        h += stark * embed(layout, {{label, ops::sigma_z()}, {kOscLabel, two_n_plus_one}});
    }
    for (int j = 0; j < k_spins; ++j) {
        for (int k = j + 1; k < k_spins; ++k) {
            const auto ju = static_cast<std::size_t>(j), ku = static_cast<std::size_t>(k);
            const double c = flip_flop_coupling(params.g[ju], params.g[ku], params.delta[ju], params.delta[ku]);
            const auto lj = spin_label(j + 1), lk = spin_label(k + 1);
            h += c * (embed(layout, {{lj, ops::sigma_plus()}, {lk, ops::sigma_minus()}}) +
                      embed(layout, {{lj, ops::sigma_minus()}, {lk, ops::sigma_plus()}}));
        }
    }
    return h;
}

Operator heff_second_order_symmetric(const SystemParams& params, int fock) {
    params.require_symmetric();
    if (params.n_spins() != 2) throw ModelError("symmetric second-order form is defined for two spins");
    const SpaceLayout layout = spin_oscillator_layout(2, fock);
    const auto& ps = protected_subspace();
    const double a2d = params.alpha * params.alpha * params.delta[0];
    const auto co = collective_operators(layout);
    const Operator two_n_plus_one = 2.0 * co.number + Operator::identity(layout);
    return a2d * (0.5 * (two_n_plus_one * co.Sz) + embed_two_spin(layout, ps.sx));
}

Operator heff_fourth_order(const SystemParams& params, int fock) {
    params.require_symmetric();
    if (params.n_spins() != 2) throw ModelError("fourth-order form is defined for two spins");
    const SpaceLayout layout = spin_oscillator_layout(2, fock);
    const double a4d = std::pow(params.alpha, 4) * params.delta[0];
    const Matrix two_n_plus_one = 2.0 * ops::number(fock) + ops::identity(fock);
    return Operator(layout, -2.0 * a4d * ops::kron(protected_subspace().sx, two_n_plus_one));
}

Operator heff_protected(const SystemParams& params, int fock) {
    params.require_symmetric();
    if (params.n_spins() != 2) throw ModelError("protected-subspace Hamiltonian is defined for two spins");
    const SpaceLayout layout = spin_oscillator_layout(2, fock);
    Matrix f = Matrix::Zero(fock, fock);
    for (int n = 0; n < fock; ++n) f(n, n) = params.delta[0] * protected_rate(params.alpha, n);
    return Operator(layout, ops::kron(protected_subspace().sx, f));
}

// ------------------------------------------------------- dispersive transform

DispersiveExpansion dispersive_expansion(const Operator& hamiltonian, const SystemParams& params, int order) {
    if (order < 2 || order > 6) throw ParameterError("dispersive expansion order must be in [2, 6]");
    const auto co = collective_operators(hamiltonian.layout());
    const double alpha = params.alpha;

    Matrix diag = hamiltonian.matrix().diagonal().asDiagonal();
    const Operator h0(hamiltonian.layout(), diag);
    const Operator h1 = hamiltonian - h0;

    std::vector<Operator> by_order;
    by_order.reserve(static_cast<std::size_t>(order) + 1);
    Operator c0 = h0;  // [J-, H0]_k
    Operator c1 = h1;  // [J-, H1]_{k-1}
    for (int k = 0; k <= order; ++k) {
        if (k > 0) c0 = commutator(co.Jminus, c0);
        Operator term = (std::pow(alpha, k) / factorial(k)) * c0;
        if (k >= 1) {
            if (k >= 2) c1 = commutator(co.Jminus, c1);
            term += (std::pow(alpha, k - 1) / factorial(k - 1)) * c1;
        }
        by_order.push_back(std::move(term));
    }
    Operator total = Operator::zero(hamiltonian.layout());
    for (const auto& t : by_order) total += t;
    const double first = by_order[1].norm();
    return {std::move(by_order), std::move(total), first};
}

Operator dispersive_transform(const Operator& hamiltonian, const SystemParams& params, int order) {
    auto ex = dispersive_expansion(hamiltonian, params, order);
    const double scale = std::max(hamiltonian.norm(), 1.0);
    if (ex.first_order_norm > 1e-12 * scale) {
        std::ostringstream os;
        os << "first-order dispersive terms do not cancel (norm " << ex.first_order_norm
           << "); the Hamiltonian is not in the oscillator-rotating Tavis-Cummings form";
        throw ModelError(os.str());
    }
    return std::move(ex.total);
}

Operator nth_order_effective(const SystemParams& params, int fock, int n) {
    params.require_symmetric();
    if (n < 2) throw ParameterError("effective order must be >= 2");
    const auto layout = spin_oscillator_layout(static_cast<int>(params.n_spins()), fock);
    const auto co = collective_operators(layout);
    const double pref = std::pow(params.alpha, n) * params.delta[0] * (n - 1) / factorial(n);
    return pref * nested_commutator(co.Jminus, co.Jplus, n - 1);
}

Matrix dispersive_unitary(const SystemParams& params, int fock) {
    const auto layout = spin_oscillator_layout(static_cast<int>(params.n_spins()), fock);
    const auto co = collective_operators(layout);
    // J- is anti-Hermitian, so K = i alpha J- is Hermitian and exp(alpha J-) = exp(-i K).
    const Operator k = (kI * params.alpha) * co.Jminus;
    return UnitaryPropagator(k).unitary(1.0);
}

cplx geometric_kernel(double x, double y) {
    if (!(std::abs(x) < 1.0)) throw DomainError("geometric kernel requires |x| < 1");
    const cplx num = 1.0 - x * std::exp(-kI * y);
    const double den = 1.0 - 2.0 * x * std::cos(y) + x * x;
    return num / den;
}

}  // namespace phonongate::model
