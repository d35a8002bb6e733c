#ifndef AFCSIM_MATRIX_HPP
#define AFCSIM_MATRIX_HPP

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>

#include "afcsim/errors.hpp"
#include "afcsim/tolerances.hpp"

namespace afcsim {

using cplx = std::complex<double>;

// Dense row-major complex square matrix of fixed dimension.
// Everything in this project is 2x2 or 4x4 (plus the small real-symmetric
// Hessians in tomography), so a flat std::array is all we need.
template <std::size_t N>
class SquareMatrix {
  public:
    SquareMatrix() { m_.fill(cplx(0.0, 0.0)); }

    static SquareMatrix identity() {
        SquareMatrix out;
        for (std::size_t i = 0; i < N; ++i) out(i, i) = 1.0;
        return out;
    }

    cplx& operator()(std::size_t i, std::size_t j) { return m_[i * N + j]; }
    const cplx& operator()(std::size_t i, std::size_t j) const { return m_[i * N + j]; }

    static constexpr std::size_t dim() { return N; }

    SquareMatrix& operator+=(const SquareMatrix& o) {
        for (std::size_t k = 0; k < N * N; ++k) m_[k] += o.m_[k];
        return *this;
    }
    SquareMatrix& operator-=(const SquareMatrix& o) {
        for (std::size_t k = 0; k < N * N; ++k) m_[k] -= o.m_[k];
        return *this;
    }
    SquareMatrix& operator*=(cplx s) {
        for (std::size_t k = 0; k < N * N; ++k) m_[k] *= s;
        return *this;
    }

    friend SquareMatrix operator+(SquareMatrix a, const SquareMatrix& b) { return a += b; }
    friend SquareMatrix operator-(SquareMatrix a, const SquareMatrix& b) { return a -= b; }
    friend SquareMatrix operator*(SquareMatrix a, cplx s) { return a *= s; }
    friend SquareMatrix operator*(cplx s, SquareMatrix a) { return a *= s; }

    friend SquareMatrix operator*(const SquareMatrix& a, const SquareMatrix& b) {
        SquareMatrix out;
        for (std::size_t i = 0; i < N; ++i)
            for (std::size_t k = 0; k < N; ++k) {
                const cplx aik = a(i, k);
                if (aik == cplx(0.0, 0.0)) continue;
                for (std::size_t j = 0; j < N; ++j) out(i, j) += aik * b(k, j);
            }
        return out;
    }

    SquareMatrix adjoint() const {
        SquareMatrix out;
        for (std::size_t i = 0; i < N; ++i)
            for (std::size_t j = 0; j < N; ++j) out(i, j) = std::conj((*this)(j, i));
        return out;
    }

    SquareMatrix conjugate() const {
        SquareMatrix out;
        for (std::size_t i = 0; i < N; ++i)
            for (std::size_t j = 0; j < N; ++j) out(i, j) = std::conj((*this)(i, j));
        return out;
    }

    cplx trace() const {
        cplx t = 0.0;
        for (std::size_t i = 0; i < N; ++i) t += (*this)(i, i);
        return t;
    }

    double frobenius_norm() const {
        double s = 0.0;
        for (const cplx& v : m_) s += std::norm(v);
        return std::sqrt(s);
    }

    double max_abs() const {
        double s = 0.0;
        for (const cplx& v : m_) s = std::max(s, std::abs(v));
        return s;
    }

    // Largest elementwise deviation from M = M^dag.
    double hermiticity_defect() const {
        double d = 0.0;
        for (std::size_t i = 0; i < N; ++i)
            for (std::size_t j = i; j < N; ++j)
                d = std::max(d, std::abs((*this)(i, j) - std::conj((*this)(j, i))));
        return d;
    }

    bool is_hermitian(double tolerance) const { return hermiticity_defect() <= tolerance; }

    bool operator==(const SquareMatrix& o) const { return m_ == o.m_; }

  private:
    std::array<cplx, N * N> m_;
};

using Matrix2 = SquareMatrix<2>;
using Matrix4 = SquareMatrix<4>;

template <std::size_t N>
struct EigResult {
    std::array<double, N> values;  // sorted descending
    SquareMatrix<N> vectors;       // eigenvectors in columns, matching order
};

// Cyclic Jacobi diagonalization for complex Hermitian matrices.
//
// Each rotation first removes the phase of the pivot H(p,q) and then applies
// the classical symmetric Schur rotation; sweeps run over (p,q) pairs in
// fixed row-major order until the off-diagonal Frobenius norm drops below
// tol::eig_offdiag * ||H||_F.
template <std::size_t N>
EigResult<N> hermitian_eig(const SquareMatrix<N>& input) {
    if (!input.is_hermitian(tol::eig_hermitian_input * std::max(1.0, input.max_abs())))
        throw ConfigError("hermitian_eig: input is not Hermitian");

    SquareMatrix<N> a = input;
    SquareMatrix<N> v = SquareMatrix<N>::identity();
    const double norm = std::max(a.frobenius_norm(), 1e-300);

    auto offdiag_norm = [](const SquareMatrix<N>& m) {
        double s = 0.0;
        for (std::size_t i = 0; i < N; ++i)
            for (std::size_t j = 0; j < N; ++j)
                if (i != j) s += std::norm(m(i, j));
        return std::sqrt(s);
    };

    int sweeps = 0;
    while (offdiag_norm(a) > tol::eig_offdiag * norm) {
        if (++sweeps > tol::eig_max_sweeps)
            throw NumericalError("hermitian_eig: Jacobi sweeps did not converge");
        for (std::size_t p = 0; p < N; ++p) {
            for (std::size_t q = p + 1; q < N; ++q) {
                const cplx apq = a(p, q);
                const double mag = std::abs(apq);
                if (mag <= 1e-300) continue;
                const cplx w = apq / mag;  // phase of the pivot
                const double app = a(p, p).real();
                const double aqq = a(q, q).real();
                const double tau = (aqq - app) / (2.0 * mag);
                const double t = (tau >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                const cplx wbar = std::conj(w);

                // Columns, J has j_pp=c, j_pq=s, j_qp=-s*conj(w), j_qq=c*conj(w).
                for (std::size_t k = 0; k < N; ++k) {
                    const cplx akp = a(k, p);
                    const cplx akq = a(k, q);
                    a(k, p) = c * akp - s * wbar * akq;
                    a(k, q) = s * akp + c * wbar * akq;
                }
                // Rows (J^dag from the left).
                for (std::size_t k = 0; k < N; ++k) {
                    const cplx apk = a(p, k);
                    const cplx aqk = a(q, k);
                    a(p, k) = c * apk - s * w * aqk;
                    a(q, k) = s * apk + c * w * aqk;
                }
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                a(p, p) = cplx(a(p, p).real(), 0.0);
                a(q, q) = cplx(a(q, q).real(), 0.0);

                for (std::size_t k = 0; k < N; ++k) {
                    const cplx vkp = v(k, p);
                    const cplx vkq = v(k, q);
                    v(k, p) = c * vkp - s * wbar * vkq;
                    v(k, q) = s * vkp + c * wbar * vkq;
                }
            }
        }
    }

    std::array<std::size_t, N> order{};
    for (std::size_t i = 0; i < N; ++i) order[i] = i;
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = i + 1; j < N; ++j)
            if (a(order[j], order[j]).real() > a(order[i], order[i]).real())
                std::swap(order[i], order[j]);

    EigResult<N> out;
    for (std::size_t i = 0; i < N; ++i) {
        out.values[i] = a(order[i], order[i]).real();
        for (std::size_t k = 0; k < N; ++k) out.vectors(k, i) = v(k, order[i]);
    }
    return out;
}

// Hermitian PSD square root: R = V sqrt(L) V^dag. Eigenvalues slightly below
// zero (numerical PSD boundary) are clamped; anything below
// tol::sqrt_psd_reject is a genuine violation and rejected.
template <std::size_t N>
SquareMatrix<N> sqrt_psd(const SquareMatrix<N>& h) {
    const EigResult<N> eig = hermitian_eig(h);
    SquareMatrix<N> out;
    for (std::size_t e = 0; e < N; ++e) {
        double lambda = eig.values[e];
        if (lambda < tol::sqrt_psd_reject)
            throw NumericalError("sqrt_psd: eigenvalue " + std::to_string(lambda) +
                                 " below PSD tolerance");
        if (lambda < 0.0) lambda = 0.0;
        const double r = std::sqrt(lambda);
        for (std::size_t i = 0; i < N; ++i) {
            const cplx vi = eig.vectors(i, e) * r;
            for (std::size_t j = 0; j < N; ++j)
                out(i, j) += vi * std::conj(eig.vectors(j, e));
        }
    }
    return out;
}

} // namespace afcsim

#endif
