#pragma once

// Finite-dimensional operator algebra on truncated spin (x) Fock spaces.
//
// A SpaceLayout is an ordered list of labelled tensor factors. Operators carry
// their layout so that embeddings, partial traces and products can be checked
// against each other. Kronecker order follows the layout: the last factor is
// the fastest-varying index.

#include <complex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace phonongate {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr cplx kI{0.0, 1.0};

struct Factor {
    std::string label;
    int dim = 1;

    friend bool operator==(const Factor&, const Factor&) = default;
};

class SpaceLayout {
public:
    SpaceLayout() = default;
    explicit SpaceLayout(std::vector<Factor> factors);

    static SpaceLayout single(std::string label, int dim);

    std::size_t size() const noexcept { return factors_.size(); }
    int dim() const noexcept { return total_; }
    const std::vector<Factor>& factors() const noexcept { return factors_; }
    const Factor& factor(std::size_t i) const { return factors_.at(i); }

    bool contains(std::string_view label) const noexcept;
    std::size_t index_of(std::string_view label) const;
    int dim_of(std::string_view label) const { return factors_[index_of(label)].dim; }

    /// Sub-layout made of the listed labels, in layout order.
    SpaceLayout subset(std::span<const std::string> keep) const;

    std::string describe() const;

    friend bool operator==(const SpaceLayout&, const SpaceLayout&) = default;

private:
    std::vector<Factor> factors_;
    int total_ = 1;
};

class Operator {
public:
    Operator(SpaceLayout layout, Matrix matrix);

    static Operator zero(const SpaceLayout& layout);
    static Operator identity(const SpaceLayout& layout);

    const SpaceLayout& layout() const noexcept { return layout_; }
    const Matrix& matrix() const noexcept { return m_; }
    Matrix& matrix() noexcept { return m_; }
    int dim() const noexcept { return static_cast<int>(m_.rows()); }

    Operator adjoint() const { return {layout_, m_.adjoint()}; }
    cplx trace() const { return m_.trace(); }
    double norm() const { return m_.norm(); }

    /// ||A - A^dagger||_F <= rel_tol * max(||A||_F, 1).
    bool is_hermitian(double rel_tol = 1e-12) const;

    Operator& operator+=(const Operator& rhs);
    Operator& operator-=(const Operator& rhs);
    Operator& operator*=(cplx s) {
        m_ *= s;
        return *this;
    }

    friend Operator operator+(Operator lhs, const Operator& rhs) { return lhs += rhs; }
    friend Operator operator-(Operator lhs, const Operator& rhs) { return lhs -= rhs; }
    friend Operator operator*(Operator lhs, cplx s) { return lhs *= s; }
    friend Operator operator*(cplx s, Operator rhs) { return rhs *= s; }
    friend Operator operator*(const Operator& lhs, const Operator& rhs);

private:
    SpaceLayout layout_;
    Matrix m_;
};

Operator commutator(const Operator& a, const Operator& b);
Operator anticommutator(const Operator& a, const Operator& b);

/// Positive, Hermitian, unit-trace operator.
class DensityOperator {
public:
    /// Validates Hermiticity (1e-12 relative), |Tr - 1| <= trace_tol and
    /// eigenvalues >= -1e-10. Throws ModelError otherwise.
    explicit DensityOperator(Operator op, double trace_tol = 1e-10);

    /// Wraps the output of a trusted trace-preserving map without re-validation.
    static DensityOperator trusted(Operator op);

    const Operator& op() const noexcept { return op_; }
    const Matrix& matrix() const noexcept { return op_.matrix(); }
    const SpaceLayout& layout() const noexcept { return op_.layout(); }
    int dim() const noexcept { return op_.dim(); }

    /// Re Tr{O rho}.
    double expectation(const Operator& observable) const;
    /// <psi|rho|psi>.
    double population(const Vector& psi) const;
    double min_eigenvalue() const;

private:
    struct TrustedTag {};
    DensityOperator(Operator op, TrustedTag) : op_(std::move(op)) {}
    Operator op_;
};

namespace ops {

Matrix identity(int d);
/// Truncated ladder operators on |0>..|N-1>; <n-1|a|n> = sqrt(n).
Matrix annihilation(int n_levels);
Matrix creation(int n_levels);
Matrix number(int n_levels);

// Two-level operators in the (|+>, |->) ordering: index 0 is the +1 eigenstate
// of sigma_z.
Matrix sigma_x();
Matrix sigma_y();
Matrix sigma_z();
Matrix sigma_plus();   // |+><-|
Matrix sigma_minus();  // |-><+|

Vector basis(int d, int i);
Matrix projector(const Vector& psi);
Matrix kron(const Matrix& a, const Matrix& b);
Vector kron(const Vector& a, const Vector& b);

}  // namespace ops

/// Kronecker product in layout order. A nullopt entry stands for the identity
/// on that factor.
Operator tensor(const SpaceLayout& layout, const std::vector<std::optional<Matrix>>& per_factor);

/// Embeds a single-factor operator, padding identities elsewhere.
Operator embed(const SpaceLayout& layout, std::string_view label, const Matrix& local);

/// Embeds a product of single-factor operators acting on distinct labels.
Operator embed(const SpaceLayout& layout,
               const std::vector<std::pair<std::string, Matrix>>& locals);

Vector tensor_state(const std::vector<Vector>& per_factor);

/// Reduced state on the kept factors (layout order preserved).
DensityOperator partial_trace(const DensityOperator& rho, std::span<const std::string> keep);
DensityOperator partial_trace(const DensityOperator& rho, std::initializer_list<std::string> keep);

/// Raw-matrix partial trace used by the typed overloads.
Matrix partial_trace(const Matrix& rho, const SpaceLayout& layout, std::span<const std::string> keep);

/// exp(-iHt) rho exp(+iHt) through the Hermitian eigendecomposition of H.
DensityOperator expm_apply(const Operator& hamiltonian, const DensityOperator& rho, double t);

/// Cached eigendecomposition of a Hermitian Hamiltonian for repeated unitary
/// propagation.
class UnitaryPropagator {
public:
    explicit UnitaryPropagator(const Operator& hamiltonian);

    const RealVector& energies() const noexcept { return energies_; }
    const Matrix& eigenvectors() const noexcept { return vectors_; }
    const SpaceLayout& layout() const noexcept { return layout_; }

    Matrix unitary(double t) const;
    DensityOperator apply(const DensityOperator& rho, double t) const;
    Vector apply(const Vector& psi, double t) const;

    /// Expectation values Re Tr{O rho(t)} on a time grid, evaluated in the
    /// energy eigenbasis so that each time point costs O(dim^2).
    std::vector<double> expectation_series(const DensityOperator& rho0, const Operator& observable,
                                           std::span<const double> times) const;

private:
    SpaceLayout layout_;
    RealVector energies_;
    Matrix vectors_;
};

}  // namespace phonongate
