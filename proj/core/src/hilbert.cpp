#include "phonongate/hilbert.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "phonongate/errors.hpp"

namespace phonongate {

// ---------------------------------------------------------------- SpaceLayout

SpaceLayout::SpaceLayout(std::vector<Factor> factors) : factors_(std::move(factors)) {
    if (factors_.empty()) throw LayoutError("a layout needs at least one factor");
    total_ = 1;
    for (std::size_t i = 0; i < factors_.size(); ++i) {
        const auto& f = factors_[i];
        if (f.dim < 1) throw LayoutError("factor '" + f.label + "' has dimension < 1");
        for (std::size_t j = 0; j < i; ++j) {
            if (factors_[j].label == f.label) throw LayoutError("duplicate factor label '" + f.label + "'");
        }
        total_ *= f.dim;
    }
}

SpaceLayout SpaceLayout::single(std::string label, int dim) {
    return SpaceLayout({Factor{std::move(label), dim}});
}

bool SpaceLayout::contains(std::string_view label) const noexcept {
    return std::any_of(factors_.begin(), factors_.end(), [&](const Factor& f) { return f.label == label; });
}

std::size_t SpaceLayout::index_of(std::string_view label) const {
    for (std::size_t i = 0; i < factors_.size(); ++i) {
        if (factors_[i].label == label) return i;
    }
    throw LayoutError("unknown factor label '" + std::string(label) + "' in " + describe());
}

SpaceLayout SpaceLayout::subset(std::span<const std::string> keep) const {
    for (const auto& k : keep) (void)index_of(k);
    std::vector<Factor> out;
    for (const auto& f : factors_) {
        if (std::find(keep.begin(), keep.end(), f.label) != keep.end()) out.push_back(f);
    }
    return SpaceLayout(std::move(out));
}

std::string SpaceLayout::describe() const {
    std::ostringstream os;
    os << '[';
    for (std::size_t i = 0; i < factors_.size(); ++i) {
        if (i) os << ", ";
        os << factors_[i].label << ':' << factors_[i].dim;
    }
    os << ']';
    return os.str();
}

// ------------------------------------------------------------------- Operator

Operator::Operator(SpaceLayout layout, Matrix matrix) : layout_(std::move(layout)), m_(std::move(matrix)) {
    if (m_.rows() != m_.cols() || m_.rows() != layout_.dim()) {
        std::ostringstream os;
        os << "matrix " << m_.rows() << 'x' << m_.cols() << " does not match layout " << layout_.describe();
        throw LayoutError(os.str());
    }
}

Operator Operator::zero(const SpaceLayout& layout) {
    return {layout, Matrix::Zero(layout.dim(), layout.dim())};
}

Operator Operator::identity(const SpaceLayout& layout) {
    return {layout, Matrix::Identity(layout.dim(), layout.dim())};
}

bool Operator::is_hermitian(double rel_tol) const {
    const double scale = std::max(m_.norm(), 1.0);
    return (m_ - m_.adjoint()).norm() <= rel_tol * scale;
}

Operator& Operator::operator+=(const Operator& rhs) {
    if (!(layout_ == rhs.layout_)) throw LayoutError("sum of operators on different layouts");
    m_ += rhs.m_;
    return *this;
}

Operator& Operator::operator-=(const Operator& rhs) {
    if (!(layout_ == rhs.layout_)) throw LayoutError("difference of operators on different layouts");
    m_ -= rhs.m_;
    return *this;
}

Operator operator*(const Operator& lhs, const Operator& rhs) {
    if (!(lhs.layout_ == rhs.layout_)) throw LayoutError("product of operators on different layouts");
    return {lhs.layout_, lhs.m_ * rhs.m_};
}

Operator commutator(const Operator& a, const Operator& b) { return a * b - b * a; }

Operator anticommutator(const Operator& a, const Operator& b) { return a * b + b * a; }

// ------------------------------------------------------------ DensityOperator

DensityOperator::DensityOperator(Operator op, double trace_tol) : op_(std::move(op)) {
    if (!op_.is_hermitian(1e-12)) throw ModelError("density operator is not Hermitian");
    const double tr = op_.trace().real();
    if (std::abs(tr - 1.0) > trace_tol) {
        std::ostringstream os;
        os << "density operator trace " << tr << " deviates from 1 by more than " << trace_tol;
        throw ModelError(os.str());
    }
    if (min_eigenvalue() < -1e-10) throw ModelError("density operator has a negative eigenvalue");
}

DensityOperator DensityOperator::trusted(Operator op) { return DensityOperator(std::move(op), TrustedTag{}); }

double DensityOperator::expectation(const Operator& observable) const {
    if (!(observable.layout() == layout())) throw LayoutError("observable layout mismatch");
    // Tr{O rho} = sum_ij O_ij rho_ji
    return (observable.matrix().transpose().cwiseProduct(matrix())).sum().real();
}

double DensityOperator::population(const Vector& psi) const {
    if (psi.size() != dim()) throw LayoutError("state vector dimension mismatch");
    return (psi.adjoint() * matrix() * psi)(0, 0).real();
}

double DensityOperator::min_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<Matrix> es(matrix(), Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

// ------------------------------------------------------------------------ ops

namespace ops {

Matrix identity(int d) { return Matrix::Identity(d, d); }

Matrix annihilation(int n_levels) {
    Matrix a = Matrix::Zero(n_levels, n_levels);
    for (int n = 1; n < n_levels; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
    return a;
}

Matrix creation(int n_levels) { return annihilation(n_levels).adjoint(); }

Matrix number(int n_levels) {
    Matrix m = Matrix::Zero(n_levels, n_levels);
    for (int n = 0; n < n_levels; ++n) m(n, n) = static_cast<double>(n);
    return m;
}

Matrix sigma_x() {
    Matrix m(2, 2);
    m << 0, 1, 1, 0;
    return m;
}

Matrix sigma_y() {
    Matrix m(2, 2);
    m << 0, -kI, kI, 0;
    return m;
}

Matrix sigma_z() {
    Matrix m(2, 2);
    m << 1, 0, 0, -1;
    return m;
}

Matrix sigma_plus() {
    Matrix m = Matrix::Zero(2, 2);
    m(0, 1) = 1.0;
    return m;
}

Matrix sigma_minus() { return sigma_plus().transpose(); }

Vector basis(int d, int i) {
    if (i < 0 || i >= d) throw LayoutError("basis index out of range");
    Vector v = Vector::Zero(d);
    v(i) = 1.0;
    return v;
}

Matrix projector(const Vector& psi) { return psi * psi.adjoint(); }

Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

Vector kron(const Vector& a, const Vector& b) {
    Vector out(a.size() * b.size());
    for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
    return out;
}

}  // namespace ops

// --------------------------------------------------------- tensor & embedding

Operator tensor(const SpaceLayout& layout, const std::vector<std::optional<Matrix>>& per_factor) {
    if (per_factor.size() != layout.size()) {
        throw LayoutError("tensor needs one entry per factor of " + layout.describe());
    }
    Matrix acc = Matrix::Identity(1, 1);
    for (std::size_t i = 0; i < per_factor.size(); ++i) {
        const int d = layout.factor(i).dim;
        if (per_factor[i]) {
            const Matrix& m = *per_factor[i];
            if (m.rows() != d || m.cols() != d) {
                throw LayoutError("factor '" + layout.factor(i).label + "' expects dimension " + std::to_string(d));
            }
            acc = ops::kron(acc, m);
        } else {
            acc = ops::kron(acc, ops::identity(d));
        }
    }
    return {layout, std::move(acc)};
}

Operator embed(const SpaceLayout& layout, std::string_view label, const Matrix& local) {
    std::vector<std::optional<Matrix>> parts(layout.size());
    parts[layout.index_of(label)] = local;
    return tensor(layout, parts);
}

Operator embed(const SpaceLayout& layout, const std::vector<std::pair<std::string, Matrix>>& locals) {
    std::vector<std::optional<Matrix>> parts(layout.size());
    for (const auto& [label, m] : locals) {
        const auto idx = layout.index_of(label);
        if (parts[idx]) throw LayoutError("factor '" + label + "' given twice");
        parts[idx] = m;
    }
    return tensor(layout, parts);
}

Vector tensor_state(const std::vector<Vector>& per_factor) {
    Vector acc = Vector::Ones(1);
    for (const auto& v : per_factor) acc = ops::kron(acc, v);
    return acc;
}

// -------------------------------------------------------------- partial trace

namespace {

// Offsets of every multi-index over the given factor positions, in row-major
// (Kronecker) order, measured in the full space.
std::vector<Eigen::Index> offsets_for(const SpaceLayout& layout, const std::vector<std::size_t>& positions) {
    std::vector<Eigen::Index> strides(layout.size());
    Eigen::Index stride = 1;
    for (std::size_t i = layout.size(); i-- > 0;) {
        strides[i] = stride;
        stride *= layout.factor(i).dim;
    }
    std::vector<Eigen::Index> offs{0};
    for (auto p : positions) {
        std::vector<Eigen::Index> next;
        next.reserve(offs.size() * static_cast<std::size_t>(layout.factor(p).dim));
        for (auto o : offs) {
            for (int k = 0; k < layout.factor(p).dim; ++k) next.push_back(o + k * strides[p]);
        }
        offs = std::move(next);
    }
    return offs;
}

}  // namespace

Matrix partial_trace(const Matrix& rho, const SpaceLayout& layout, std::span<const std::string> keep) {
    if (rho.rows() != layout.dim()) throw LayoutError("partial_trace: matrix does not match layout");
    std::vector<std::size_t> kept, traced;
    for (const auto& k : keep) (void)layout.index_of(k);
    for (std::size_t i = 0; i < layout.size(); ++i) {
        const bool is_kept = std::find(keep.begin(), keep.end(), layout.factor(i).label) != keep.end();
        (is_kept ? kept : traced).push_back(i);
    }
    const auto ko = offsets_for(layout, kept);
    const auto to = offsets_for(layout, traced);
    const auto dk = static_cast<Eigen::Index>(ko.size());
    Matrix out = Matrix::Zero(dk, dk);
    for (Eigen::Index i = 0; i < dk; ++i) {
        for (Eigen::Index j = 0; j < dk; ++j) {
            cplx s = 0.0;
            for (auto t : to) s += rho(ko[i] + t, ko[j] + t);
            out(i, j) = s;
        }
    }
    return out;
}

DensityOperator partial_trace(const DensityOperator& rho, std::span<const std::string> keep) {
    SpaceLayout reduced = rho.layout().subset(keep);
    Matrix m = partial_trace(rho.matrix(), rho.layout(), keep);
    return DensityOperator::trusted(Operator(std::move(reduced), std::move(m)));
}

DensityOperator partial_trace(const DensityOperator& rho, std::initializer_list<std::string> keep) {
    std::vector<std::string> k(keep);
    return partial_trace(rho, std::span<const std::string>(k));
}

// ---------------------------------------------------------- unitary evolution

UnitaryPropagator::UnitaryPropagator(const Operator& hamiltonian) : layout_(hamiltonian.layout()) {
    if (!hamiltonian.is_hermitian(1e-10)) throw ModelError("Hamiltonian is not Hermitian");
    Eigen::SelfAdjointEigenSolver<Matrix> es(hamiltonian.matrix());
    if (es.info() != Eigen::Success) throw ModelError("Hermitian eigendecomposition failed");
    energies_ = es.eigenvalues();
    vectors_ = es.eigenvectors();
}

Matrix UnitaryPropagator::unitary(double t) const {
    Vector phase = (-kI * t * energies_.cast<cplx>()).array().exp();
    return vectors_ * phase.asDiagonal() * vectors_.adjoint();
}

DensityOperator UnitaryPropagator::apply(const DensityOperator& rho, double t) const {
    if (!(rho.layout() == layout_)) throw LayoutError("propagator/state layout mismatch");
    const Matrix u = unitary(t);
    return DensityOperator::trusted(Operator(layout_, u * rho.matrix() * u.adjoint()));
}

Vector UnitaryPropagator::apply(const Vector& psi, double t) const {
    if (psi.size() != layout_.dim()) throw LayoutError("propagator/state dimension mismatch");
    Vector phase = (-kI * t * energies_.cast<cplx>()).array().exp();
    return vectors_ * phase.cwiseProduct(vectors_.adjoint() * psi);
}

std::vector<double> UnitaryPropagator::expectation_series(const DensityOperator& rho0, const Operator& observable,
                                                          std::span<const double> times) const {
    if (!(rho0.layout() == layout_) || !(observable.layout() == layout_)) {
        throw LayoutError("expectation_series layout mismatch");
    }
    const Matrix rho_e = vectors_.adjoint() * rho0.matrix() * vectors_;
    const Matrix obs_e = vectors_.adjoint() * observable.matrix() * vectors_;
    // <O>(t) = sum_jk O_kj rho_jk exp(-i (E_j - E_k) t)
    const Matrix w = obs_e.transpose().cwiseProduct(rho_e);
    std::vector<double> out;
    out.reserve(times.size());
    for (double t : times) {
        const Vector phase = (-kI * t * energies_.cast<cplx>()).array().exp();
        out.push_back((phase.transpose() * (w * phase.conjugate()))(0, 0).real());
    }
    return out;
}

DensityOperator expm_apply(const Operator& hamiltonian, const DensityOperator& rho, double t) {
    return UnitaryPropagator(hamiltonian).apply(rho, t);
}

}  // namespace phonongate
