#include "phonongate/damping_basis.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "phonongate/errors.hpp"
#include "phonongate/model.hpp"

namespace phonongate::dampingbasis {

const char* to_string(Family f) {
    switch (f) {
        case Family::Dephasing1: return "dephasing-1";
        case Family::DephasingZ: return "dephasing-z";
        case Family::DephasingPlus: return "dephasing-+";
        case Family::DephasingMinus: return "dephasing--";
        case Family::MuPlus: return "mu-+";
        case Family::MuMinus: return "mu--";
        case Family::EtaPlus: return "eta-+";
        case Family::EtaMinus: return "eta--";
    }
    return "?";
}

namespace {

SpaceLayout pair_layout(int fock) { return model::spin_oscillator_layout(2, fock); }

Matrix sz_sz() { return ops::kron(ops::sigma_z(), ops::sigma_z()); }

// (sz -+ i sy) / 8 for the +/- dephasing coherences.
Matrix dephasing_coherence(int sign) {
    const auto& ps = model::protected_subspace();
    return (ps.sz - static_cast<double>(sign) * kI * ps.sy) / 8.0;
}

Operator fock_product(int fock, const Matrix& spin, const Vector& osc_diag) {
    return Operator(pair_layout(fock), ops::kron(spin, Matrix(osc_diag.asDiagonal())));
}

Vector fock_projector_diag(int fock, int n) {
    Vector v = Vector::Zero(fock);
    v(n) = 1.0;
    return v;
}

void require_damping(const ClosedFormParams& p) {
    if (!(p.gamma > 0.0)) throw DomainError("mechanical damping basis requires gamma > 0");
    if (!(p.nbar > 0.0)) {
        throw DomainError("left eta elements are singular at nbar = 0; the damping basis needs nbar > 0");
    }
}

// h_n(m) = diag_n(m) / (1-s)^m from the three-term recurrence.
cplx laguerre_reduced(int n, cplx c, cplx s, double m) {
    const cplx r = 1.0 - s;
    const cplx b = r + c;
    cplx h0 = 1.0;
    if (n == 0) return h0;
    cplx h1 = 1.0 - m * c / r;
    for (int k = 1; k < n; ++k) {
        const double kk = k;
        const cplx h2 = (((1.0 + m) * r - m * b + (r + b) * kk) * h1 - b * kk * h0) / (r * (kk + 1.0));
        h0 = h1;
        h1 = h2;
    }
    return h1;
}

struct DiagonalSpec {
    cplx pref;
    cplx c;
    cplx s;
};

DiagonalSpec eta_right_spec(const ClosedFormParams& p, const DampingConstants& k, int n) {
    const double n1 = p.nbar + 1.0;
    return {eta_prefactor(p, k, n), (k.A + 2.0 * k.xi) / n1, k.xi / n1};
}

DiagonalSpec eta_left_spec(const ClosedFormParams& p, const DampingConstants& k) {
    return {1.0, (k.A + 2.0 * k.xi) / p.nbar, (k.xi - 1.0) / p.nbar};
}

DiagonalSpec mu_right_spec(double nbar, int n) {
    const double n1 = nbar + 1.0;
    return {std::pow(nbar / n1, n) / n1, 1.0 / n1, 1.0 / n1};
}

DiagonalSpec mu_left_spec(double nbar) { return {1.0, 1.0 / nbar, 0.0}; }

Vector diagonal(const DiagonalSpec& d, int n, int length) { return d.pref * laguerre_diagonal(n, d.c, d.s, length); }

// sum_m left(m) right(m) with the geometric factors combined to avoid overflow.
cplx fock_sum(const DiagonalSpec& left, int nl, const DiagonalSpec& right, int nr) {
    const cplx ratio = (1.0 - left.s) * (1.0 - right.s);
    const double rho = std::abs(ratio);
    if (!(rho < 1.0)) throw ConvergenceError("Fock-space overlap sum does not converge (|ratio| >= 1)");
    const double past_peak = (nl + nr + 2) / -std::log(rho);
    cplx sum = 0.0;
    cplx power = 1.0;
    double peak = 0.0;
    int quiet = 0;
    for (int m = 0; m < 1000000; ++m) {
        const cplx term =
            power * laguerre_reduced(nl, left.c, left.s, m) * laguerre_reduced(nr, right.c, right.s, m);
        sum += term;
        peak = std::max(peak, std::abs(term));
        quiet = std::abs(term) < 1e-18 * std::max(peak, 1e-300) ? quiet + 1 : 0;
        if (m > past_peak && quiet >= 16) return left.pref * right.pref * sum;
        power *= ratio;
    }
    throw ConvergenceError("Fock-space overlap sum did not converge within 10^6 terms");
}

}  // namespace

// -------------------------------------------------------------- dephasing

std::vector<EigenElement> dephasing_eigensystem(const ClosedFormParams& p, int fock, int n_max) {
    if (!(p.Gamma >= 0.0)) throw ParameterError("Gamma must be >= 0");
    if (n_max >= fock) throw ParameterError("n_max must be below the Fock truncation");
    const Matrix one = Matrix::Identity(4, 4);
    std::vector<EigenElement> out;
    for (int n = 0; n <= n_max; ++n) {
        const Vector proj = fock_projector_diag(fock, n);
        const double f = model::protected_rate(p.alpha, n) * p.delta;
        out.push_back({0.0, fock_product(fock, one / 4.0, proj), fock_product(fock, one, proj), Family::Dephasing1, n});
        out.push_back({-2.0 * p.Gamma, fock_product(fock, sz_sz() / 4.0, proj), fock_product(fock, sz_sz(), proj),
                       Family::DephasingZ, n});
        for (int sign : {+1, -1}) {
            const cplx lambda = cplx(-p.Gamma, -2.0 * sign * f);
            out.push_back({lambda, fock_product(fock, dephasing_coherence(sign), proj),
                           fock_product(fock, 16.0 * dephasing_coherence(-sign), proj),
                           sign > 0 ? Family::DephasingPlus : Family::DephasingMinus, n});
        }
    }
    return out;
}

std::vector<DephasingCoefficients> dephasing_coefficients(double nbar, int n_max) {
    const auto w = model::thermal_weights(nbar, n_max + 1);
    std::vector<DephasingCoefficients> out;
    for (int n = 0; n <= n_max; ++n) {
        const double c = w[static_cast<std::size_t>(n)];
        out.push_back({n, c, -c, 2.0 * c, 2.0 * c});
    }
    return out;
}

Matrix dephasing_propagate(double t, const ClosedFormParams& p, int n_max) {
    const double tail = std::pow(p.q(), n_max + 1);
    if (tail > 1e-12) {
        std::ostringstream os;
        os << "thermal weight beyond n_max = " << n_max << " is " << tail << " (> 1e-12)";
        throw TruncationError(os.str());
    }
    const Matrix one = Matrix::Identity(4, 4) / 4.0;
    const Matrix zz = sz_sz() / 4.0;
    const Matrix plus = dephasing_coherence(+1);
    const Matrix minus = dephasing_coherence(-1);
    Matrix rho = Matrix::Zero(4, 4);
    const auto coeffs = dephasing_coefficients(p.nbar, n_max);
    // Sum smallest terms first.
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) {
        const double f = model::protected_rate(p.alpha, it->n) * p.delta;
        rho += it->c1 * one;
        rho += (it->cz * std::exp(-2.0 * p.Gamma * t)) * zz;
        rho += (it->c_plus * std::exp(cplx(-p.Gamma, -2.0 * f) * t)) * plus;
        rho += (it->c_minus * std::exp(cplx(-p.Gamma, 2.0 * f) * t)) * minus;
    }
    return rho;
}

Matrix dephasing_state(double t, const ClosedFormParams& p, int fock) {
    const auto th = model::thermal_state(p.nbar, fock);
    const Matrix one = Matrix::Identity(4, 4) / 4.0;
    const Matrix zz = sz_sz() / 4.0;
    const Matrix plus = dephasing_coherence(+1);
    const Matrix minus = dephasing_coherence(-1);
    Matrix rho = Matrix::Zero(4 * fock, 4 * fock);
    for (int n = 0; n < fock; ++n) {
        const double c = th.rho.matrix()(n, n).real();
        const double f = model::protected_rate(p.alpha, n) * p.delta;
        Matrix block = c * one - (c * std::exp(-2.0 * p.Gamma * t)) * zz +
                       (2.0 * c * std::exp(cplx(-p.Gamma, -2.0 * f) * t)) * plus +
                       (2.0 * c * std::exp(cplx(-p.Gamma, 2.0 * f) * t)) * minus;
        for (int i = 0; i < 4; ++i) {
            for (int j = 0; j < 4; ++j) rho(i * fock + n, j * fock + n) = block(i, j);
        }
    }
    return rho;
}

// ---------------------------------------------------- normal-ordered Laguerre

Vector laguerre_diagonal(int n, cplx c, cplx s, int length) {
    if (n < 0 || length < 1) throw ParameterError("Laguerre index must be >= 0 and length >= 1");
    const cplx r = 1.0 - s;
    if (r == cplx(0.0)) throw DomainError("normal-ordered exponential with s = 1 is not supported");
    Vector out(length);
    cplx power = 1.0;
    for (int m = 0; m < length; ++m) {
        out(m) = power * laguerre_reduced(n, c, s, m);
        power *= r;
    }
    return out;
}

Vector laguerre_diagonal_explicit(int n, cplx c, cplx s, int length) {
    const cplx r = 1.0 - s;
    Vector out = Vector::Zero(length);
    double binom = 1.0;     // C(n, k)
    double factorial = 1.0; // k!
    for (int k = 0; k <= n; ++k) {
        if (k > 0) {
            binom = binom * (n - k + 1) / k;
            factorial *= k;
        }
        const cplx coeff = (k % 2 ? -1.0 : 1.0) * binom / factorial * std::pow(c, k);
        for (int m = k; m < length; ++m) {
            double falling = 1.0;
            for (int j = 0; j < k; ++j) falling *= m - j;
            out(m) += coeff * falling * std::pow(r, m - k);
        }
    }
    return out;
}

// ------------------------------------------------------ mechanical damping

cplx eta_prefactor(const ClosedFormParams& p, const DampingConstants& k, int n) {
    const double n1 = p.nbar + 1.0;
    const cplx u = n1 - k.xi;
    return (k.A + 2.0 * k.xi) * u / (p.nbar * n1) * std::pow(u / (n1 + k.A + k.xi), n);
}

Vector eta_right_diagonal(const ClosedFormParams& p, const DampingConstants& k, int n, int length) {
    require_damping(p);
    return diagonal(eta_right_spec(p, k, n), n, length);
}

Vector eta_left_diagonal(const ClosedFormParams& p, const DampingConstants& k, int n, int length) {
    require_damping(p);
    return diagonal(eta_left_spec(p, k), n, length);
}

Vector mu_right_diagonal(double nbar, int n, int length) { return diagonal(mu_right_spec(nbar, n), n, length); }

Vector mu_left_diagonal(double nbar, int n, int length) {
    if (!(nbar > 0.0)) throw DomainError("left mu elements are singular at nbar = 0");
    return diagonal(mu_left_spec(nbar), n, length);
}

Vector apply_K(const Vector& diag, const ClosedFormParams& p, int sign) {
    const cplx kappa(-p.gamma * (2.0 * p.nbar + 1.0) / 2.0, -sign * 4.0 * std::pow(p.alpha, 4) * p.delta);
    const int len = static_cast<int>(diag.size());
    Vector out(len);
    for (int m = 0; m < len; ++m) {
        cplx v = 2.0 * kappa * static_cast<double>(m) * diag(m);
        if (m + 1 < len) v += p.gamma * (p.nbar + 1.0) * (m + 1.0) * diag(m + 1);
        if (m > 0) v += p.gamma * p.nbar * static_cast<double>(m) * diag(m - 1);
        out(m) = v;
    }
    return out;
}

cplx k_eigenvalue(const ClosedFormParams& p, const DampingConstants& k, int n) {
    return -p.gamma * (static_cast<double>(n) * (k.A + 2.0 * k.xi) + k.xi - 1.0 - p.nbar);
}

cplx eta_overlap(const ClosedFormParams& p, const DampingConstants& k, int m, int n) {
    require_damping(p);
    return fock_sum(eta_left_spec(p, k), m, eta_right_spec(p, k, n), n);
}

cplx mu_overlap(double nbar, int m, int n) {
    if (!(nbar > 0.0)) throw DomainError("left mu elements are singular at nbar = 0");
    return fock_sum(mu_left_spec(nbar), m, mu_right_spec(nbar, n), n);
}

cplx eta_trace(const ClosedFormParams& p, const DampingConstants& k, int n) {
    require_damping(p);
    return fock_sum({1.0, 0.0, 0.0}, 0, eta_right_spec(p, k, n), n);
}

cplx eta_coefficient(const DampingConstants& k, int n) { return std::pow(-(k.A + k.xi) / k.xi, n) / k.xi; }

std::vector<EigenElement> damping_eigensystem(const ClosedFormParams& p, int fock, int n_max) {
    require_damping(p);
    if (n_max >= fock) throw ParameterError("n_max must be below the Fock truncation");
    const auto k = analytic::damping_constants(p, +1);
    const auto& ps = model::protected_subspace();
    const Matrix half_plus = 0.5 * (ps.projector + ps.sx);
    const Matrix half_minus = 0.5 * (ps.projector - ps.sx);
    const Matrix eta_r = 0.25 * (ps.sz + kI * ps.sy);
    const Matrix eta_l = ps.sz - kI * ps.sy;
    std::vector<EigenElement> out;
    for (int n = 0; n <= n_max; ++n) {
        const Vector mr = mu_right_diagonal(p.nbar, n, fock);
        const Vector ml = mu_left_diagonal(p.nbar, n, fock);
        const cplx lambda_mu = -static_cast<double>(n) * p.gamma;
        out.push_back({lambda_mu, fock_product(fock, half_plus, mr), fock_product(fock, half_plus, ml), Family::MuPlus, n});
        out.push_back(
            {lambda_mu, fock_product(fock, half_minus, mr), fock_product(fock, half_minus, ml), Family::MuMinus, n});
    }
    for (int n = 0; n <= n_max; ++n) {
        const Operator right = fock_product(fock, eta_r, eta_right_diagonal(p, k, n, fock));
        const Operator left = fock_product(fock, eta_l, eta_left_diagonal(p, k, n, fock));
        const cplx lambda = analytic::eta_eigenvalue(p, k, n, +1);
        out.push_back({lambda, right, left, Family::EtaPlus, n});
        out.push_back({std::conj(lambda), right.adjoint(), left.adjoint(), Family::EtaMinus, n});
    }
    return out;
}

DampingPropagation damping_propagate(double t, const ClosedFormParams& p, int n_max, double tolerance) {
    require_damping(p);
    const auto k = analytic::damping_constants(p, +1);
    DampingPropagation out;
    cplx y = 0.0;
    int quiet = 0;
    bool converged = false;
    for (int n = 0; n <= n_max; ++n) {
        const cplx term = eta_coefficient(k, n) * std::exp(analytic::eta_eigenvalue(p, k, n, +1) * t) * eta_trace(p, k, n);
        y += term;
        out.terms = n + 1;
        quiet = std::abs(term) < 1e-12 * std::max(std::abs(y), 1e-300) ? quiet + 1 : 0;
        if (!std::isfinite(std::abs(y))) break;
        if (quiet >= 3) {
            converged = true;
            break;
        }
    }
    if (!converged) {
        std::ostringstream os;
        os << "eta series did not converge in " << n_max + 1 << " terms (|(A+xi)/xi| = "
           << std::abs((k.A + k.xi) / k.xi) << ")";
        throw ConvergenceError(os.str());
    }
    const auto& ps = model::protected_subspace();
    out.Y_series = y;
    out.Y_closed = analytic::Y_function(t, p, k);
    out.series = 0.5 * ps.projector + (0.5 * y.real()) * ps.sz - (0.5 * y.imag()) * ps.sy;
    out.closed_form = analytic::reduced_state_mech(t, p);
    out.difference = (out.series - out.closed_form).cwiseAbs().maxCoeff();
    if (!(out.difference <= tolerance)) {
        std::ostringstream os;
        os << "eta series and closed form differ by " << out.difference << " (tolerance " << tolerance << ")";
        throw ConvergenceError(os.str());
    }
    return out;
}

Matrix damping_state(double t, const ClosedFormParams& p, int fock, int n_max) {
    require_damping(p);
    const auto k = analytic::damping_constants(p, +1);
    const auto& ps = model::protected_subspace();
    const auto th = model::thermal_state(p.nbar, fock);
    Vector eta = Vector::Zero(fock);
    for (int n = n_max; n >= 0; --n) {
        eta += eta_coefficient(k, n) * std::exp(analytic::eta_eigenvalue(p, k, n, +1) * t) *
               eta_right_diagonal(p, k, n, fock);
    }
    Matrix rho = ops::kron(0.5 * ps.projector, th.rho.matrix());
    const Matrix coh = ops::kron(0.25 * (ps.sz + kI * ps.sy), Matrix(eta.asDiagonal()));
    rho += coh + coh.adjoint();
    return rho;
}

// ------------------------------------------------------- dense oracle

Matrix fock_diagonal_liouvillian(const dynamics::LindbladGenerator& gen) {
    const auto& layout = gen.layout();
    const auto& osc = layout.factor(layout.size() - 1);
    if (osc.label != model::kOscLabel) throw LayoutError("oscillator must be the last factor");
    const int nf = osc.dim;
    const int ns = layout.dim() / nf;
    const int sector = ns * ns * nf;
    Matrix l = Matrix::Zero(sector, sector);
    Matrix e = Matrix::Zero(layout.dim(), layout.dim());
    double leak = 0.0;
    for (int s = 0; s < ns; ++s) {
        for (int sp = 0; sp < ns; ++sp) {
            for (int m = 0; m < nf; ++m) {
                e.setZero();
                e(s * nf + m, sp * nf + m) = 1.0;
                Matrix out = gen.apply(e);
                const int col = (s * ns + sp) * nf + m;
                for (int a = 0; a < ns; ++a) {
                    for (int b = 0; b < ns; ++b) {
                        for (int mm = 0; mm < nf; ++mm) {
                            cplx& v = out(a * nf + mm, b * nf + mm);
                            l((a * ns + b) * nf + mm, col) = v;
                            v = 0.0;
                        }
                    }
                }
                leak = std::max(leak, out.cwiseAbs().maxCoeff());
            }
        }
    }
    if (leak > 1e-12) {
        std::ostringstream os;
        os << "generator leaks out of the Fock-diagonal sector (max " << leak << ")";
        throw ModelError(os.str());
    }
    return l;
}

Eigen::VectorXcd fock_diagonal_spectrum(const dynamics::LindbladGenerator& gen) {
    Eigen::ComplexEigenSolver<Matrix> es(fock_diagonal_liouvillian(gen), false);
    if (es.info() != Eigen::Success) throw ConvergenceError("Liouvillian eigensolve failed");
    return es.eigenvalues();
}

double spectral_distance(const Eigen::VectorXcd& spectrum, cplx value) {
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < spectrum.size(); ++i) best = std::min(best, std::abs(spectrum(i) - value));
    return best;
}

}  // namespace phonongate::dampingbasis
