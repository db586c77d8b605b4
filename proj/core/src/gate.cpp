#include "phonongate/gate.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "phonongate/dynamics.hpp"
#include "phonongate/errors.hpp"
#include "phonongate/model.hpp"

namespace phonongate::gate {

using std::numbers::pi;

namespace ops3 {

Matrix sigma_z() {
    Matrix m = Matrix::Zero(3, 3);
    m(0, 0) = 1.0;
    m(1, 1) = -1.0;
    return m;
}

Matrix sigma_plus() {
    Matrix m = Matrix::Zero(3, 3);
    m(kLevelPlus, kLevelMinus) = 1.0;
    return m;
}

Matrix sigma_minus() { return sigma_plus().adjoint(); }

Matrix sigma_x() { return sigma_plus() + sigma_minus(); }

Matrix aux_projector() {
    Matrix m = Matrix::Zero(3, 3);
    m(kLevelAux, kLevelAux) = 1.0;
    return m;
}

Matrix basis_exchange() {
    Matrix b = Matrix::Zero(3, 3);
    b.topLeftCorner(2, 2) = model::basis_exchange();
    b(2, 2) = 1.0;
    return b;
}

}  // namespace ops3

namespace {

constexpr std::array<std::array<int, 2>, 5> kPairStates{{{kLevelPlus, kLevelPlus},
                                                         {kLevelPlus, kLevelMinus},
                                                         {kLevelMinus, kLevelPlus},
                                                         {kLevelMinus, kLevelMinus},
                                                         {kLevelAux, kLevelAux}}};

int full_index(const std::array<int, kSpins>& levels) {
    int idx = 0;
    for (int l : levels) idx = idx * 3 + l;
    return idx;
}

Matrix on_spins(const std::vector<std::pair<int, Matrix>>& locals) {
    Matrix out = Matrix::Identity(1, 1);
    for (int k = 0; k < kSpins; ++k) {
        Matrix local = Matrix::Identity(3, 3);
        for (const auto& [idx, m] : locals) {
            if (idx == k) local = m;
        }
        out = ops::kron(out, local);
    }
    return out;
}

Matrix rotation(const Vector& u, const Vector& v, double theta) {
    const Matrix x = u * v.adjoint() + v * u.adjoint();
    const Matrix p = u * u.adjoint() + v * v.adjoint();
    return Matrix::Identity(u.size(), u.size()) + (std::cos(theta) - 1.0) * p - kI * std::sin(theta) * x;
}

Vector level(int l) { return ops::basis(3, l); }

Vector e_state() { return (level(kLevelPlus) + level(kLevelMinus)) / std::sqrt(2.0); }
Vector g_state() { return (level(kLevelPlus) - level(kLevelMinus)) / std::sqrt(2.0); }

Vector pair_vector(int sj, int sk) { return ops::basis(9, sj * 3 + sk); }

struct Eigen25 {
    RealVector energies;
    Matrix vectors;
};

Eigen25 diagonalize(const Matrix& h) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    if (es.info() != Eigen::Success) throw ConvergenceError("sector Hamiltonian eigensolve failed");
    return {es.eigenvalues(), es.eigenvectors()};
}

Vector propagate(const Eigen25& e, const Vector& psi, double t) {
    Vector c = e.vectors.adjoint() * psi;
    for (int i = 0; i < c.size(); ++i) c(i) *= std::exp(-kI * (e.energies(i) * t));
    return e.vectors * c;
}

Vector to_sector(const Vector& full, const char* what) {
    if (full.size() != kFullDim) throw LayoutError(std::string(what) + " must be an 81-dim four-spin vector");
    const Matrix& v = sector_isometry();
    Vector s = v.adjoint() * full;
    if ((v * s - full).norm() > 1e-12) throw ParameterError(std::string(what) + " leaves the gate sector");
    if (std::abs(s.norm() - 1.0) > 1e-10) throw ParameterError(std::string(what) + " must be normalised");
    return s;
}

}  // namespace

Vector LogicalQubit::zero() const {
    std::array<int, kSpins> l{kLevelAux, kLevelAux, kLevelAux, kLevelAux};
    l[static_cast<std::size_t>(pair[0])] = kLevelMinus;
    l[static_cast<std::size_t>(pair[1])] = kLevelPlus;
    return product_state(l);
}

Vector LogicalQubit::aux() const { return product_state({kLevelAux, kLevelAux, kLevelAux, kLevelAux}); }

Vector product_state(const std::array<int, kSpins>& levels) {
    for (int l : levels) {
        if (l < 0 || l > 2) throw ParameterError("spin level must be 0, 1 or 2");
    }
    return ops::basis(kFullDim, full_index(levels));
}

Vector logical_state(cplx c00, cplx c0A, cplx cA0, cplx cAA) {
    const int m = kLevelMinus, p = kLevelPlus, a = kLevelAux;
    return c00 * product_state({m, p, m, p}) + c0A * product_state({m, p, a, a}) +
           cA0 * product_state({a, a, m, p}) + cAA * product_state({a, a, a, a});
}

const Matrix& sector_isometry() {
    static const Matrix v = [] {
        Matrix m = Matrix::Zero(kFullDim, kSectorDim);
        for (int p1 = 0; p1 < 5; ++p1) {
            for (int p2 = 0; p2 < 5; ++p2) {
                const auto& a = kPairStates[static_cast<std::size_t>(p1)];
                const auto& b = kPairStates[static_cast<std::size_t>(p2)];
                m(full_index({a[0], a[1], b[0], b[1]}), p1 * 5 + p2) = 1.0;
            }
        }
        return m;
    }();
    return v;
}

// ------------------------------------------------------------- GateConfig

GateConfig GateConfig::standard(double alpha, double nbar, double detuning_multiple) {
    GateConfig c;
    c.alpha = alpha;
    c.nbar = nbar;
    const double g = c.gbar();
    c.DeltaBar = {detuning_multiple * g, 0.0, 0.0, -detuning_multiple * g};
    return c;
}

double GateConfig::gbar() const { return model::effective_rabi_frequency(alpha, delta); }

double GateConfig::tau() const { return 2.0 * pi / gbar(); }

int GateConfig::fock_levels() const { return fock > 0 ? fock : model::fock_cutoff(nbar); }

double GateConfig::suppression_ratio() const {
    double min_gap = std::numeric_limits<double>::infinity();
    for (int j = 0; j < kSpins; ++j) {
        for (int k = j + 1; k < kSpins; ++k) {
            if (j == 1 && k == 2) continue;
            if (!driven[static_cast<std::size_t>(j)] || !driven[static_cast<std::size_t>(k)]) continue;
            min_gap = std::min(min_gap, std::abs(DeltaBar[static_cast<std::size_t>(j)] -
                                                 DeltaBar[static_cast<std::size_t>(k)]));
        }
    }
    return gbar() / min_gap;
}

void GateConfig::validate() const {
    if (!(alpha > 0.0 && alpha <= 0.2)) throw ConfigError("alpha must lie in (0, 0.2]");
    if (!(nbar >= 0.0)) throw ConfigError("nbar must be >= 0");
    if (!(min_ratio > 0.0)) throw ConfigError("min_ratio must be positive");
    const double r = suppression_ratio();
    if (r > 1.0 / min_ratio) {
        std::ostringstream os;
        os << "suppression ratio gbar / min|DeltaBar_j - DeltaBar_k| = " << r << " exceeds " << 1.0 / min_ratio;
        throw ConfigError(os.str());
    }
    if (driven[1] && driven[2] && std::abs(DeltaBar[1] - DeltaBar[2]) > 1e-12 * gbar()) {
        throw ConfigError("spins 2 and 3 must share the same Stark shift");
    }
}

Matrix full_hamiltonian(const GateConfig& config, int n) {
    const double f = model::protected_rate(config.alpha, n) * config.delta;
    const double stark = config.alpha * config.alpha * config.delta * (2.0 * n + 1.0) / 2.0;
    Matrix h = Matrix::Zero(kFullDim, kFullDim);
    for (int k = 0; k < kSpins; ++k) {
        if (!config.driven[static_cast<std::size_t>(k)]) continue;
        h += (config.DeltaBar[static_cast<std::size_t>(k)] / 2.0 + stark) * on_spins({{k, ops3::sigma_z()}});
    }
    for (int j = 0; j < kSpins; ++j) {
        for (int k = j + 1; k < kSpins; ++k) {
            if (!config.driven[static_cast<std::size_t>(j)] || !config.driven[static_cast<std::size_t>(k)]) continue;
            h += f * (on_spins({{j, ops3::sigma_plus()}, {k, ops3::sigma_minus()}}) +
                      on_spins({{j, ops3::sigma_minus()}, {k, ops3::sigma_plus()}}));
        }
    }
    return h;
}

Matrix sector_hamiltonian(const GateConfig& config, int n) {
    const Matrix& v = sector_isometry();
    const Matrix h = full_hamiltonian(config, n);
    Matrix hs = v.adjoint() * h * v;
    if ((h * v - v * hs).norm() > 1e-12 * std::max(1.0, h.norm())) {
        throw ModelError("gate Hamiltonian does not leave the logical sector invariant");
    }
    return hs;
}

// ---------------------------------------------------------------- run_gate

GateResult run_gate(const GateConfig& config, const Vector& initial, const Vector& target,
                    const std::optional<GateNoise>& noise) {
    config.validate();
    const Vector psi0 = to_sector(initial, "initial state");
    const Vector tgt = to_sector(target, "target state");
    const double tau = config.tau();
    const Matrix& v = sector_isometry();

    GateResult r;
    const bool damped = noise && noise->gamma > 0.0;
    const bool dephased = noise && noise->Gamma > 0.0;
    if (noise && (noise->gamma < 0.0 || noise->Gamma < 0.0)) throw ConfigError("noise rates must be >= 0");

    if (!damped) {
        const int nf = config.fock_levels();
        const auto th = model::thermal_state(config.nbar, nf);
        if (th.renormalized) r.warnings.push_back("thermal state renormalised over the Fock truncation");
        r.fock_levels = nf;
        r.sector_state = Matrix::Zero(kSectorDim, kSectorDim);
        r.amplitude = 0.0;
        const Matrix tproj = tgt * tgt.adjoint();
        double skipped = 0.0;
        for (int n = 0; n < nf; ++n) {
            const double p = th.rho.matrix()(n, n).real();
            if (p == 0.0) continue;
            if (dephased && p < noise->weight_floor) {
                skipped += p;
                continue;
            }
            const Matrix h = sector_hamiltonian(config, n);
            if (!dephased) {
                const Vector psi = propagate(diagonalize(h), psi0, tau);
                const cplx amp = tgt.dot(psi);
                r.amplitude += p * amp;
                r.fidelity += p * std::norm(amp);
                r.sector_state += p * psi * psi.adjoint();
            } else {
                const SpaceLayout layout = SpaceLayout::single("logical", kSectorDim);
                dynamics::EvolutionSpec spec{Operator(layout, h), {}, tau, std::nullopt, {}, {tau}};
                for (int k = 0; k < kSpins; ++k) {
                    const Matrix jump = on_spins({{k, ops3::sigma_x() + ops3::aux_projector()}});
                    spec.dissipators.push_back(
                        dynamics::SpinDephasing{noise->Gamma, {"logical"}, Matrix(v.adjoint() * jump * v)});
                }
                spec.observables.push_back({"fidelity", Operator(layout, tproj), true});
                spec.keep_states = true;
                spec.tolerance = noise->tolerance;
                const auto rho0 = DensityOperator(Operator(layout, psi0 * psi0.adjoint()));
                const auto tr = dynamics::evolve(rho0, spec);
                r.fidelity += p * tr["fidelity"].back();
                r.sector_state += p * tr.states.back().matrix();
            }
        }
        if (skipped > 0.0) {
            r.fidelity /= 1.0 - skipped;
            r.sector_state /= 1.0 - skipped;
            std::ostringstream os;
            os << "skipped Fock levels with total weight " << skipped;
            r.warnings.push_back(os.str());
        }
        r.method = dephased ? "per-Fock Lindblad (spin dephasing)" : "per-Fock unitary";
        return r;
    }

    const int nf = noise->damping_fock;
    if (kSectorDim * nf > noise->dimension_budget) {
        std::ostringstream os;
        os << "joint gate simulation needs dimension " << kSectorDim * nf << " > budget " << noise->dimension_budget;
        throw ConfigError(os.str());
    }
    const SpaceLayout layout({{"logical", kSectorDim}, {model::kOscLabel, nf}});
    Matrix h = Matrix::Zero(layout.dim(), layout.dim());
    for (int n = 0; n < nf; ++n) {
        h += ops::kron(sector_hamiltonian(config, n), ops::projector(ops::basis(nf, n)));
    }
    const auto th = model::thermal_state(config.nbar, nf);
    if (th.tail > 1e-3) {
        std::ostringstream os;
        os << "thermal tail " << th.tail << " outside " << nf << " Fock levels";
        r.warnings.push_back(os.str());
    }
    dynamics::EvolutionSpec spec{Operator(layout, h), {}, tau, std::nullopt, {}, {tau}};
    spec.dissipators.push_back(dynamics::MechanicalDamping{noise->gamma, config.nbar, model::kOscLabel});
    if (dephased) {
        for (int k = 0; k < kSpins; ++k) {
            const Matrix jump = on_spins({{k, ops3::sigma_x() + ops3::aux_projector()}});
            spec.dissipators.push_back(
                dynamics::SpinDephasing{noise->Gamma, {"logical"}, Matrix(v.adjoint() * jump * v)});
        }
    }
    spec.observables.push_back({"fidelity", embed(layout, "logical", tgt * tgt.adjoint()), true});
    spec.keep_states = true;
    spec.tolerance = noise->tolerance;
    const auto rho0 = DensityOperator::trusted(Operator(layout, ops::kron(psi0 * psi0.adjoint(), th.rho.matrix())));
    const auto tr = dynamics::evolve(rho0, spec);
    r.fidelity = tr["fidelity"].back();
    r.sector_state = partial_trace(tr.states.back(), {"logical"}).matrix();
    r.fock_levels = nf;
    r.amplitude = std::numeric_limits<double>::quiet_NaN();
    r.method = dephased ? "joint Lindblad (damping and dephasing)" : "joint Lindblad (damping)";
    return r;
}

std::vector<TruthTableLine> truth_table(const GateConfig& config, const std::optional<GateNoise>& noise) {
    std::vector<TruthTableLine> lines;
    const auto add = [&](std::string label, Vector in, Vector ideal) {
        auto res = run_gate(config, in, ideal, noise);
        lines.push_back({std::move(label), std::move(in), std::move(ideal), std::move(res)});
    };
    add("|0>|0>", logical_state(1, 0, 0, 0), logical_state(-1, 0, 0, 0));
    add("|0>|A>", logical_state(0, 1, 0, 0), logical_state(0, 1, 0, 0));
    add("|A>|0>", logical_state(0, 0, 1, 0), logical_state(0, 0, 1, 0));
    add("|A>|A>", logical_state(0, 0, 0, 1), logical_state(0, 0, 0, 1));
    return lines;
}

Matrix logical_amplitudes(const GateConfig& config, int n) {
    config.validate();
    const Matrix& v = sector_isometry();
    const auto e = diagonalize(sector_hamiltonian(config, n));
    const std::array<Vector, 4> basis{logical_state(1, 0, 0, 0), logical_state(0, 1, 0, 0),
                                      logical_state(0, 0, 1, 0), logical_state(0, 0, 0, 1)};
    Matrix a(4, 4);
    for (int j = 0; j < 4; ++j) {
        const Vector out = v * propagate(e, v.adjoint() * basis[static_cast<std::size_t>(j)], config.tau());
        for (int i = 0; i < 4; ++i) a(i, j) = basis[static_cast<std::size_t>(i)].dot(out);
    }
    return a;
}

Vector entangling_input() { return logical_state(0.5, 0.5, 0.5, 0.5); }

Vector entangling_target() { return logical_state(-0.5, 0.5, 0.5, 0.5); }

// ------------------------------------------------------------- preparation

PreparationTrace prepare_initial() {
    const Vector a = level(kLevelAux);
    const Matrix id3 = Matrix::Identity(3, 3);
    PreparationTrace tr;

    // (i) a-e then a-g rotations; the a-g sign selects |-> on j and |+> on k.
    const Matrix ae = rotation(a, e_state(), pi / 4.0);
    const Matrix uj = rotation(a, g_state(), -pi / 2.0) * ae;
    const Matrix uk = rotation(a, g_state(), pi / 2.0) * ae;
    Vector psi = ops::kron(uj, uk) * pair_vector(kLevelAux, kLevelAux);
    // Each spin picks up a global factor -i; drop the product.
    psi *= -1.0;
    tr.after_step_i = psi;

    // (ii) quarter Rabi cycle exp(-i pi/4 flip-flop), then |+> -> i|+> on spin j.
    const Matrix quarter = rotation(pair_vector(kLevelMinus, kLevelPlus), pair_vector(kLevelPlus, kLevelMinus), pi / 4.0);
    Matrix phase = id3;
    phase(kLevelPlus, kLevelPlus) = kI;
    psi = ops::kron(phase, id3) * (quarter * psi);
    tr.after_step_ii = psi;

    // (iii) g-a pi pulses on both spins.
    const Matrix ga = rotation(g_state(), a, pi / 2.0);
    psi = ops::kron(ga, ga) * psi;
    tr.after_step_iii = psi;

    // e/g rotations e -> |-> (spin j) and e -> |+> (spin k).
    const Matrix wj = level(kLevelMinus) * e_state().adjoint() + level(kLevelPlus) * g_state().adjoint() + a * a.adjoint();
    const Matrix wk = level(kLevelPlus) * e_state().adjoint() + level(kLevelMinus) * g_state().adjoint() + a * a.adjoint();
    tr.final_state = ops::kron(wj, wk) * psi;
    return tr;
}

Vector to_eg_basis(const Vector& pair_state) {
    if (pair_state.size() != 9) throw LayoutError("pair state must be 9-dimensional");
    const Matrix b = ops3::basis_exchange();
    return ops::kron(b, b) * pair_state;
}

Vector embed_pair(const Vector& pair_state, std::array<int, 2> pair, const Vector& rest_pair_state) {
    if (pair_state.size() != 9 || rest_pair_state.size() != 9) throw LayoutError("pair states must be 9-dimensional");
    if (pair[0] == pair[1] || pair[0] < 0 || pair[1] < 0 || pair[0] >= kSpins || pair[1] >= kSpins) {
        throw ParameterError("pair must name two distinct spins");
    }
    std::array<int, 2> rest{};
    int r = 0;
    for (int k = 0; k < kSpins; ++k) {
        if (k != pair[0] && k != pair[1]) rest[static_cast<std::size_t>(r++)] = k;
    }
    Vector out = Vector::Zero(kFullDim);
    for (int x = 0; x < 9; ++x) {
        for (int y = 0; y < 9; ++y) {
            const cplx c = pair_state(x) * rest_pair_state(y);
            if (c == cplx(0.0)) continue;
            std::array<int, kSpins> l{};
            l[static_cast<std::size_t>(pair[0])] = x / 3;
            l[static_cast<std::size_t>(pair[1])] = x % 3;
            l[static_cast<std::size_t>(rest[0])] = y / 3;
            l[static_cast<std::size_t>(rest[1])] = y % 3;
            out(full_index(l)) += c;
        }
    }
    return out;
}

// ------------------------------------------------------------- selectivity

SelectivityResult selectivity_scan(const SelectivityConfig& config, std::span<const double> times) {
    const int nf = config.fock > 0 ? config.fock : model::fock_cutoff(config.nbar);
    const auto th = model::thermal_state(config.nbar, nf);
    const auto& ps = model::protected_subspace();
    const Matrix z1 = ops::kron(ops::sigma_z(), ops::identity(2));
    const Matrix z2 = ops::kron(ops::identity(2), ops::sigma_z());
    const Matrix flip = ps.sx;

    auto series = [&](double shift1, double shift2) {
        std::vector<double> f(times.size(), 0.0);
        for (int n = 0; n < nf; ++n) {
            const double p = th.rho.matrix()(n, n).real();
            const double stark = config.alpha * config.alpha * config.delta * (2.0 * n + 1.0) / 2.0;
            const Matrix h = (shift1 / 2.0 + stark) * z1 + (shift2 / 2.0 + stark) * z2 +
                             (model::protected_rate(config.alpha, n) * config.delta) * flip;
            const auto e = diagonalize(h);
            for (std::size_t i = 0; i < times.size(); ++i) {
                f[i] += p * std::norm(ps.zero.dot(propagate(e, ps.zero, times[i])));
            }
        }
        return f;
    };

    SelectivityResult r;
    r.times.assign(times.begin(), times.end());
    r.F_resonant = series(0.0, 0.0);
    r.F_suppressed = series(config.suppressed_shift, 0.0);
    r.F_common = series(config.common_shift, config.common_shift);
    for (double f : r.F_suppressed) r.max_transfer_suppressed = std::max(r.max_transfer_suppressed, 1.0 - f);
    return r;
}

// ------------------------------------------------------------- unprotected

UnprotectedOracle unprotected_gate_oracle(double nbar, double alpha, int terms) {
    if (!(nbar >= 0.0)) throw ParameterError("nbar must be >= 0");
    if (!(alpha > 0.0)) throw ParameterError("alpha must be positive");
    const double tau = pi / (alpha * alpha);
    const auto w = model::thermal_weights(nbar, terms);
    const int p = kLevelPlus, m = kLevelMinus, a = kLevelAux;
    auto phi = [&](cplx beta) {
        return Vector(0.5 * (-pair_vector(p, m) + beta * pair_vector(p, a) + std::conj(beta) * pair_vector(a, m) +
                             pair_vector(a, a)));
    };
    UnprotectedOracle o;
    for (int n = 0; n < terms; ++n) {
        // |+> carries sigma_z = +1 under (alpha^2/2)(2n+1) sigma_z.
        o.beta.push_back(std::exp(-kI * (alpha * alpha * (2.0 * n + 1.0) / 2.0 * tau)));
    }
    const Vector phi0 = phi(o.beta[0]);
    double kept = 0.0;
    for (int n = terms - 1; n >= 0; --n) {
        kept += w[static_cast<std::size_t>(n)] * std::norm(phi(o.beta[static_cast<std::size_t>(n)]).dot(phi0));
    }
    o.brute_force = 1.0 - kept;
    o.closed_form = nbar / (2.0 * nbar + 1.0);
    return o;
}

}  // namespace phonongate::gate
