#include "phonongate/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "phonongate/analytic.hpp"
#include "phonongate/errors.hpp"

namespace phonongate::dynamics {

namespace {

SparseMatrix to_sparse(const Matrix& m) {
    return m.sparseView(cplx(1.0, 0.0), 1e-300);
}

// Max absolute row sum of a sparse matrix.
double inf_norm(const SparseMatrix& m) {
    Eigen::VectorXd rows = Eigen::VectorXd::Zero(m.rows());
    for (int k = 0; k < m.outerSize(); ++k) {
        for (SparseMatrix::InnerIterator it(m, k); it; ++it) rows(it.row()) += std::abs(it.value());
    }
    return rows.size() ? rows.maxCoeff() : 0.0;
}

std::vector<std::string> spin_factor_labels(const SpaceLayout& layout) {
    std::vector<std::string> out;
    for (const auto& f : layout.factors()) {
        if (f.label.rfind("spin", 0) == 0) out.push_back(f.label);
    }
    return out;
}

}  // namespace

Observable projector_observable(std::string name, const SpaceLayout& layout, const Matrix& local_projector,
                                std::span<const std::string> labels) {
    const SpaceLayout sub = layout.subset(labels);
    if (sub.size() != labels.size()) throw LayoutError("projector labels must be distinct layout factors");
    if (local_projector.rows() != sub.dim()) throw LayoutError("projector dimension does not match its factors");
    // Build the operator on the sub-layout order, then permute into the full layout.
    std::vector<int> strides(layout.size(), 1);
    for (int i = static_cast<int>(layout.size()) - 2; i >= 0; --i) {
        strides[static_cast<std::size_t>(i)] =
            strides[static_cast<std::size_t>(i) + 1] * layout.factor(static_cast<std::size_t>(i) + 1).dim;
    }
    std::vector<std::size_t> kept;
    for (const auto& f : sub.factors()) kept.push_back(layout.index_of(f.label));
    const int d = layout.dim();
    Matrix m = Matrix::Zero(d, d);
    auto split = [&](int idx, std::vector<int>& digits) {
        for (std::size_t i = 0; i < layout.size(); ++i) {
            digits[i] = idx / strides[i];
            idx %= strides[i];
        }
    };
    auto sub_index = [&](const std::vector<int>& digits) {
        int s = 0;
        for (std::size_t i : kept) s = s * layout.factor(i).dim + digits[i];
        return s;
    };
    std::vector<int> dr(layout.size()), dc(layout.size());
    for (int r = 0; r < d; ++r) {
        split(r, dr);
        for (int c = 0; c < d; ++c) {
            split(c, dc);
            bool same_rest = true;
            for (std::size_t i = 0; i < layout.size() && same_rest; ++i) {
                if (std::find(kept.begin(), kept.end(), i) == kept.end() && dr[i] != dc[i]) same_rest = false;
            }
            if (same_rest) m(r, c) = local_projector(sub_index(dr), sub_index(dc));
        }
    }
    return {std::move(name), Operator(layout, std::move(m)), true};
}

void EvolutionSpec::validate() const {
    if (!(t_final > 0.0)) throw ParameterError("t_final must be positive");
    if (dt && !(*dt > 0.0)) throw ParameterError("dt must be positive when given");
    if (!(tolerance > 0.0)) throw ParameterError("refinement tolerance must be positive");
    if (max_halvings < 0) throw ParameterError("max_halvings must be >= 0");
    for (double t : times) {
        if (t < 0.0 || t > t_final * (1.0 + 1e-12)) throw ParameterError("output times must lie in [0, t_final]");
    }
    if (!std::is_sorted(times.begin(), times.end())) throw ParameterError("output times must be sorted");
    if (!hamiltonian.is_hermitian(1e-10)) throw ModelError("Hamiltonian is not Hermitian");
    for (const auto& o : observables) {
        if (!(o.op.layout() == hamiltonian.layout())) throw LayoutError("observable '" + o.name + "' layout mismatch");
    }
}

const std::vector<double>& Trajectory::operator[](const std::string& name) const {
    auto it = values.find(name);
    if (it == values.end()) throw ParameterError("trajectory has no observable '" + name + "'");
    return it->second;
}

// ---------------------------------------------------------------- generator

LindbladGenerator::LindbladGenerator(const Operator& hamiltonian, const std::vector<Dissipator>& dissipators)
    : layout_(hamiltonian.layout()) {
    const auto& layout = layout_;
    Matrix decay = Matrix::Zero(layout.dim(), layout.dim());
    double jump_norm = 0.0;
    auto add_jump = [&](double rate, const Operator& l) {
        if (rate == 0.0) return;
        if (rate < 0.0) throw ParameterError("dissipator rates must be >= 0");
        Jump j{rate, to_sparse(l.matrix()), to_sparse(l.matrix().adjoint())};
        const Matrix ldl = l.matrix().adjoint() * l.matrix();
        decay += rate * ldl;
        jump_norm += rate * inf_norm(j.op) * inf_norm(j.adj) + rate * inf_norm(to_sparse(ldl));
        jumps_.push_back(std::move(j));
    };
    for (const auto& d : dissipators) {
        if (const auto* s = std::get_if<SpinDephasing>(&d)) {
            auto labels = s->spins.empty() ? spin_factor_labels(layout) : s->spins;
            for (const auto& label : labels) {
                const int ld = layout.dim_of(label);
                Matrix local = s->jump ? *s->jump : ops::sigma_x();
                if (local.rows() != ld) {
                    throw LayoutError("dephasing jump operator does not match factor '" + label + "'");
                }
                add_jump(0.5 * s->Gamma, embed(layout, label, local));
            }
        } else {
            const auto& m = std::get<MechanicalDamping>(d);
            if (m.nbar < 0.0) throw ParameterError("nbar must be >= 0");
            const int n = layout.dim_of(m.label);
            add_jump(m.gamma * (m.nbar + 1.0), embed(layout, m.label, ops::annihilation(n)));
            add_jump(m.gamma * m.nbar, embed(layout, m.label, ops::creation(n)));
        }
    }
    Matrix heff = hamiltonian.matrix() - 0.5 * kI * decay;
    heff_ = to_sparse(heff);
    heff_adj_ = to_sparse(heff.adjoint());
    norm_ = 2.0 * inf_norm(heff_) + jump_norm;
}

Matrix LindbladGenerator::apply(const Matrix& rho) const {
    Workspace ws;
    Matrix out;
    apply(rho, out, ws);
    return out;
}

void LindbladGenerator::apply(const Matrix& rho, Matrix& out, Workspace& ws) const {
    if (rho.rows() != dim() || rho.cols() != dim()) throw LayoutError("state dimension does not match generator");
    // Scalar-times-product expressions fall off Eigen's sparse fast path.
    ws.tmp.resize(dim(), dim());
    ws.tmp.noalias() = heff_ * rho;
    out = -kI * ws.tmp;
    ws.tmp.noalias() = rho * heff_adj_;
    out += kI * ws.tmp;
    ws.lr.resize(dim(), dim());
    for (const auto& j : jumps_) {
        ws.lr.noalias() = j.op * rho;
        ws.tmp.noalias() = ws.lr * j.adj;
        out += j.rate * ws.tmp;
    }
}

Operator lindblad_rhs(const DensityOperator& rho, const EvolutionSpec& spec) {
    if (!(rho.layout() == spec.hamiltonian.layout())) throw LayoutError("state and Hamiltonian layouts differ");
    LindbladGenerator gen(spec.hamiltonian, spec.dissipators);
    return {rho.layout(), gen.apply(rho.matrix())};
}

// ------------------------------------------------------------------- evolve

namespace {

struct Pass {
    std::vector<std::vector<double>> values;  // [observable][time]
    std::vector<Matrix> states;
    long steps = 0;
    double max_trace_drift = 0.0;
};

Pass integrate(const LindbladGenerator& gen, const Matrix& rho0, const std::vector<double>& times, double dt,
               const std::vector<Observable>& observables, bool keep_states) {
    Pass p;
    p.values.assign(observables.size(), {});
    const cplx tr0 = rho0.trace();
    Matrix rho = rho0;
    Matrix k1, k2, k3, k4, stage;
    LindbladGenerator::Workspace ws;
    double t = 0.0;
    auto record = [&] {
        for (std::size_t k = 0; k < observables.size(); ++k) {
            p.values[k].push_back((observables[k].op.matrix().cwiseProduct(rho.transpose())).sum().real());
        }
        p.max_trace_drift = std::max(p.max_trace_drift, std::abs(rho.trace() - tr0));
        if (keep_states) p.states.push_back(rho);
    };
    for (double target : times) {
        const double span = target - t;
        if (span > 0.0) {
            const long n = std::max(1L, static_cast<long>(std::ceil(span / dt - 1e-9)));
            const double h = span / static_cast<double>(n);
            for (long s = 0; s < n; ++s) {
                gen.apply(rho, k1, ws);
                stage = rho + (0.5 * h) * k1;
                gen.apply(stage, k2, ws);
                stage = rho + (0.5 * h) * k2;
                gen.apply(stage, k3, ws);
                stage = rho + h * k3;
                gen.apply(stage, k4, ws);
                rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            }
            p.steps += n;
            t = target;
        }
        record();
    }
    return p;
}

double max_change(const Pass& a, const Pass& b) {
    double m = 0.0;
    for (std::size_t k = 0; k < a.values.size(); ++k) {
        for (std::size_t i = 0; i < a.values[k].size(); ++i) {
            m = std::max(m, std::abs(a.values[k][i] - b.values[k][i]));
        }
    }
    return m;
}

}  // namespace

Trajectory evolve(const DensityOperator& rho0, const EvolutionSpec& spec) {
    spec.validate();
    if (!(rho0.layout() == spec.hamiltonian.layout())) throw LayoutError("initial state and Hamiltonian layouts differ");

    std::vector<double> times = spec.times;
    if (times.empty()) {
        for (int i = 0; i <= 100; ++i) times.push_back(spec.t_final * i / 100.0);
    }

    const LindbladGenerator gen(spec.hamiltonian, spec.dissipators);
    double dt = spec.dt.value_or(0.0);
    if (!spec.dt) {
        const double norm = gen.norm_estimate();
        dt = norm > 0.0 ? 2.0 / norm : spec.t_final;
    }
    // A step longer than an output interval would leave the first halving
    // with the same sub-steps and a vacuous comparison.
    double prev = 0.0;
    for (double t : times) {
        if (t > prev) dt = std::min(dt, t - prev);
        prev = t;
    }

    Pass coarse = integrate(gen, rho0.matrix(), times, dt, spec.observables, false);
    long total_steps = coarse.steps;
    int halvings = 0;
    double change = 0.0;
    Pass fine;
    // Without observables the refinement compares the trace only.
    const bool have_obs = !spec.observables.empty();
    while (true) {
        if (halvings >= spec.max_halvings) {
            std::ostringstream os;
            os << "step control failed after " << spec.max_halvings << " halvings (last change " << change
               << ", tolerance " << spec.tolerance << ")";
            throw IntegratorError(os.str());
        }
        dt *= 0.5;
        ++halvings;
        fine = integrate(gen, rho0.matrix(), times, dt, spec.observables,
                         spec.keep_states || spec.check_positivity || !have_obs);
        total_steps += fine.steps;
        if (have_obs) {
            change = max_change(coarse, fine);
        } else {
            change = 0.0;
            Pass again = integrate(gen, rho0.matrix(), times, 2.0 * dt, {}, true);
            for (std::size_t i = 0; i < fine.states.size(); ++i) {
                change = std::max(change, (fine.states[i] - again.states[i]).cwiseAbs().maxCoeff());
            }
            total_steps += again.steps;
        }
        if (std::isfinite(change) && change < spec.tolerance) break;
        coarse = std::move(fine);
    }

    if (fine.max_trace_drift > 1e-8) {
        std::ostringstream os;
        os << "trace drift " << fine.max_trace_drift << " exceeds 1e-8";
        throw IntegratorError(os.str());
    }

    Trajectory tr;
    tr.times = times;
    tr.metadata.dimension = gen.dim();
    tr.metadata.dt = dt;
    tr.metadata.halvings = halvings;
    tr.metadata.steps = total_steps;
    tr.metadata.refinement_change = change;
    tr.metadata.max_trace_drift = fine.max_trace_drift;
    for (std::size_t k = 0; k < spec.observables.size(); ++k) {
        const auto& o = spec.observables[k];
        if (o.projector) {
            for (double v : fine.values[k]) {
                if (v < -1e-8 || v > 1.0 + 1e-8) {
                    std::ostringstream os;
                    os << "projector observable '" << o.name << "' left [0, 1]: " << v;
                    throw IntegratorError(os.str());
                }
            }
        }
        tr.order.push_back(o.name);
        tr.values.emplace(o.name, std::move(fine.values[k]));
    }
    if (spec.keep_states || spec.check_positivity) {
        double min_ev = 1.0;
        for (auto& m : fine.states) {
            Operator op(rho0.layout(), std::move(m));
            if (spec.check_positivity) {
                Matrix h = 0.5 * (op.matrix() + op.matrix().adjoint());
                min_ev = std::min(min_ev, Eigen::SelfAdjointEigenSolver<Matrix>(h, Eigen::EigenvaluesOnly)
                                              .eigenvalues()
                                              .minCoeff());
            }
            if (spec.keep_states) tr.states.push_back(DensityOperator::trusted(std::move(op)));
        }
        tr.metadata.min_eigenvalue = min_ev;
    }
    return tr;
}

// ---------------------------------------------------------- number blocks

namespace {

struct BlockView {
    int spin_dim;
    int levels;

    Matrix block(const Matrix& m, int n) const {
        Matrix b(spin_dim, spin_dim);
        for (int s = 0; s < spin_dim; ++s) {
            for (int r = 0; r < spin_dim; ++r) b(s, r) = m(s * levels + n, r * levels + n);
        }
        return b;
    }

    // Largest entry connecting different number levels.
    double leak(const Matrix& m) const {
        double worst = 0.0;
        for (int i = 0; i < m.rows(); ++i) {
            for (int j = 0; j < m.cols(); ++j) {
                if (i % levels != j % levels) worst = std::max(worst, std::abs(m(i, j)));
            }
        }
        return worst;
    }
};

}  // namespace

Trajectory evolve_number_blocks(const DensityOperator& rho0, const EvolutionSpec& spec) {
    spec.validate();
    const SpaceLayout& layout = spec.hamiltonian.layout();
    if (!(rho0.layout() == layout)) throw LayoutError("initial state and Hamiltonian layouts differ");
    if (layout.size() < 2 || layout.factors().back().label != model::kOscLabel) {
        throw ModelError("number-block evolution needs the oscillator as the last factor");
    }
    const int levels = layout.factors().back().dim;
    const BlockView view{layout.dim() / levels, levels};

    std::vector<std::string> spin_labels;
    for (std::size_t i = 0; i + 1 < layout.size(); ++i) spin_labels.push_back(layout.factor(i).label);
    const SpaceLayout spin_layout = layout.subset(spin_labels);

    const double scale = std::max(1.0, spec.hamiltonian.matrix().cwiseAbs().maxCoeff());
    if (view.leak(spec.hamiltonian.matrix()) > 1e-12 * scale) {
        throw ModelError("Hamiltonian couples different oscillator number levels");
    }
    if (view.leak(rho0.matrix()) > 1e-12) throw ModelError("initial state has number-level coherences");
    for (const auto& d : spec.dissipators) {
        if (std::holds_alternative<MechanicalDamping>(d)) {
            throw ModelError("mechanical damping couples oscillator number levels");
        }
    }
    for (const auto& o : spec.observables) {
        if (view.leak(o.op.matrix()) > 1e-12) {
            throw ModelError("observable '" + o.name + "' couples oscillator number levels");
        }
    }

    std::vector<double> times = spec.times;
    if (times.empty()) {
        for (int i = 0; i <= 100; ++i) times.push_back(spec.t_final * i / 100.0);
    }

    Trajectory tr;
    tr.times = times;
    tr.metadata.dimension = view.spin_dim;
    for (const auto& o : spec.observables) {
        tr.order.push_back(o.name);
        tr.values[o.name].assign(times.size(), 0.0);
    }
    std::vector<Matrix> states;
    if (spec.keep_states) states.assign(times.size(), Matrix::Zero(layout.dim(), layout.dim()));

    int blocks = 0;
    for (int n = 0; n < levels; ++n) {
        const Matrix rn = view.block(rho0.matrix(), n);
        const double p = rn.trace().real();
        if (p <= 0.0) continue;
        EvolutionSpec sub{Operator(spin_layout, view.block(spec.hamiltonian.matrix(), n)),
                          spec.dissipators,
                          spec.t_final,
                          spec.dt,
                          {},
                          times,
                          spec.tolerance,
                          spec.max_halvings,
                          spec.keep_states,
                          spec.check_positivity};
        for (const auto& o : spec.observables) {
            sub.observables.push_back({o.name, Operator(spin_layout, view.block(o.op.matrix(), n)), o.projector});
        }
        const auto part = evolve(DensityOperator::trusted(Operator(spin_layout, rn / p)), sub);
        for (const auto& o : spec.observables) {
            auto& acc = tr.values[o.name];
            const auto& v = part[o.name];
            for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += p * v[i];
        }
        if (spec.keep_states) {
            for (std::size_t i = 0; i < times.size(); ++i) {
                const Matrix& b = part.states[i].matrix();
                for (int s = 0; s < view.spin_dim; ++s) {
                    for (int r = 0; r < view.spin_dim; ++r) states[i](s * levels + n, r * levels + n) = p * b(s, r);
                }
            }
        }
        auto& m = tr.metadata;
        m.dt = blocks == 0 ? part.metadata.dt : std::min(m.dt, part.metadata.dt);
        m.halvings = std::max(m.halvings, part.metadata.halvings);
        m.steps += part.metadata.steps;
        m.refinement_change = std::max(m.refinement_change, part.metadata.refinement_change);
        m.max_trace_drift = std::max(m.max_trace_drift, p * part.metadata.max_trace_drift);
        if (spec.check_positivity) {
            m.min_eigenvalue = blocks == 0 ? p * part.metadata.min_eigenvalue
                                           : std::min(m.min_eigenvalue, p * part.metadata.min_eigenvalue);
        }
        ++blocks;
    }
    for (auto& s : states) tr.states.push_back(DensityOperator::trusted(Operator(layout, std::move(s))));
    std::ostringstream os;
    os << blocks << " number blocks of dimension " << view.spin_dim;
    tr.metadata.notes.push_back(os.str());
    return tr;
}

// ------------------------------------------------------- exact vs effective

double fast_component_rms(std::span<const double> series, int window) {
    if (window < 3) throw ParameterError("moving-average window must span at least 3 samples");
    const int half = window / 2;
    const int n = static_cast<int>(series.size());
    if (n < 2 * half + 1) return 0.0;
    double acc = 0.0;
    int count = 0;
    for (int i = half; i < n - half; ++i) {
        double mean = 0.0;
        for (int j = i - half; j <= i + half; ++j) mean += series[static_cast<std::size_t>(j)];
        mean /= 2 * half + 1;
        const double r = series[static_cast<std::size_t>(i)] - mean;
        acc += r * r;
        ++count;
    }
    return std::sqrt(acc / count);
}

Comparison exact_vs_effective(const model::SystemParams& params, std::span<const double> times,
                              const ComparisonOptions& options) {
    params.require_symmetric();
    if (params.n_spins() != 2) throw ModelError("exact/effective comparison is defined for two spins");
    if (times.empty()) throw ParameterError("time grid must be non-empty");
    const auto cf = analytic::ClosedFormParams::from(params);

    const Operator h = model::tavis_cummings(params, options.fock, model::Frame::Oscillator);
    const auto& layout = h.layout();
    const auto& ps = model::protected_subspace();

    Matrix rho0 = model::thermal_product_state(layout, ps.zero, params.nbar).matrix();
    Matrix proj = model::embed_two_spin(layout, ps.zero * ps.zero.adjoint()).matrix();
    if (options.dress_initial_state) {
        const Matrix u = model::dispersive_unitary(params, options.fock);  // exp(alpha J-)
        rho0 = u.adjoint() * rho0 * u;
        proj = u.adjoint() * proj * u;
    }
    const auto rho = DensityOperator::trusted(Operator(layout, rho0));
    const Operator observable(layout, proj);

    const UnitaryPropagator prop(h);
    Comparison c;
    c.times.assign(times.begin(), times.end());
    c.F_exact = prop.expectation_series(rho, observable, times);
    c.F_effective.reserve(times.size());
    for (double t : times) c.F_effective.push_back(analytic::fidelity_F(t, cf));
    for (std::size_t i = 0; i < times.size(); ++i) {
        c.max_deviation = std::max(c.max_deviation, std::abs(c.F_exact[i] - c.F_effective[i]));
    }
    c.thermal_tail = std::pow(params.q(), options.fock);

    // Fast-oscillation detector on a dedicated grid of 64 fast periods.
    const int per = std::max(options.samples_per_fast_period, 4);
    const double fast_period = 2.0 * std::numbers::pi / params.delta.front();
    std::vector<double> grid;
    for (int i = 0; i <= 64 * per; ++i) grid.push_back(i * fast_period / per);
    const auto fe = prop.expectation_series(rho, observable, grid);
    std::vector<double> fa;
    for (double t : grid) fa.push_back(analytic::fidelity_F(t, cf));
    c.fast_rms_exact = fast_component_rms(fe, per + 1);
    c.fast_rms_effective = fast_component_rms(fa, per + 1);
    c.fast_oscillations_exact_only = c.fast_rms_exact > 1e-6 && c.fast_rms_exact > 10.0 * c.fast_rms_effective;
    return c;
}

}  // namespace phonongate::dynamics
