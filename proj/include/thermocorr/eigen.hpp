#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "thermocorr/complex_matrix.hpp"
#include "thermocorr/constants.hpp"
#include "thermocorr/errors.hpp"

namespace thermocorr {

/// Eigendecomposition of a Hermitian matrix. Eigenvalues ascending,
/// eigenvectors as columns of an orthonormal matrix.
struct HermitianEig {
    std::vector<double> eigenvalues;
    ComplexMatrix eigenvectors;
};

namespace detail {

// One complex Jacobi rotation zeroing A(p,q). A is Hermitian; V accumulates
// the similarity transforms so that A_in = V A_out V^dag on convergence.
inline void jacobi_rotate(ComplexMatrix& a, ComplexMatrix& v, std::size_t p, std::size_t q) {
    const cplx z = a(p, q);
    const double r = std::abs(z);
    if (r == 0.0) return;
    const cplx phase = z / r;
    const double app = a(p, p).real();
    const double aqq = a(q, q).real();
    // zero the off-diagonal of [[app, z],[conj(z), aqq]]: t = tan(theta) is the
    // smaller-magnitude root of t^2 - 2*tau*t - 1 = 0
    const double tau = (aqq - app) / (2.0 * r);
    const double t = (tau >= 0.0 ? -1.0 : 1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
    const double c = 1.0 / std::sqrt(1.0 + t * t);
    const double s = t * c;

    // U = [[c, s*phase], [-s*conj(phase), c]] on the (p,q) plane
    const cplx upp = c, upq = s * phase, uqp = -s * std::conj(phase), uqq = c;
    const std::size_t n = a.rows();
    for (std::size_t k = 0; k < n; ++k) {
        const cplx akp = a(k, p), akq = a(k, q);
        a(k, p) = akp * std::conj(upp) + akq * std::conj(upq);
        a(k, q) = akp * std::conj(uqp) + akq * std::conj(uqq);
    }
    for (std::size_t k = 0; k < n; ++k) {
        const cplx apk = a(p, k), aqk = a(q, k);
        a(p, k) = upp * apk + upq * aqk;
        a(q, k) = uqp * apk + uqq * aqk;
    }
    for (std::size_t k = 0; k < n; ++k) {
        const cplx vkp = v(k, p), vkq = v(k, q);
        v(k, p) = vkp * std::conj(upp) + vkq * std::conj(upq);
        v(k, q) = vkp * std::conj(uqp) + vkq * std::conj(uqq);
    }
    // enforce exact zero and real diagonal after the rotation
    a(p, q) = 0.0;
    a(q, p) = 0.0;
    a(p, p) = a(p, p).real();
    a(q, q) = a(q, q).real();
}

inline double max_offdiag(const ComplexMatrix& a) {
    double m = 0.0;
    const std::size_t n = a.rows();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) m = std::max(m, std::abs(a(i, j)));
    return m;
}

} // namespace detail

/// Cyclic complex Jacobi diagonalization. Converges when every off-diagonal
/// element is below tol().jacobi_offdiag (scaled by the matrix magnitude).
inline HermitianEig eigh(const ComplexMatrix& a) {
    if (!a.square()) throw NotSquareError("eigh: matrix not square");
    if (a.hermiticity_defect() > tol().hermiticity)
        throw NotHermitianError("eigh: input not Hermitian within tolerance");

    const std::size_t n = a.rows();
    ComplexMatrix work = a;
    // symmetrize rounding noise so rotations see an exactly Hermitian matrix
    for (std::size_t i = 0; i < n; ++i) {
        work(i, i) = work(i, i).real();
        for (std::size_t j = i + 1; j < n; ++j) {
            const cplx m = 0.5 * (work(i, j) + std::conj(work(j, i)));
            work(i, j) = m;
            work(j, i) = std::conj(m);
        }
    }
    ComplexMatrix v = ComplexMatrix::identity(n);

    const double scale = std::max(1.0, work.max_abs());
    const double conv = tol().jacobi_offdiag * scale;
    const int max_sweeps = 60;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        if (detail::max_offdiag(work) <= conv) break;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q)
                if (std::abs(work(p, q)) > conv * 0.01) detail::jacobi_rotate(work, v, p, q);
    }

    HermitianEig out;
    out.eigenvalues.resize(n);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::vector<double> diag(n);
    for (std::size_t i = 0; i < n; ++i) diag[i] = work(i, i).real();
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return diag[x] < diag[y]; });
    out.eigenvectors = ComplexMatrix(n, n);
    for (std::size_t c = 0; c < n; ++c) {
        out.eigenvalues[c] = diag[order[c]];
        for (std::size_t r = 0; r < n; ++r) out.eigenvectors(r, c) = v(r, order[c]);
    }
    return out;
}

/// Eigenvalues of a Hermitian matrix sorted non-increasing.
inline std::vector<double> spectrum_desc(const ComplexMatrix& a) {
    auto eg = eigh(a);
    std::reverse(eg.eigenvalues.begin(), eg.eigenvalues.end());
    return eg.eigenvalues;
}

} // namespace thermocorr
