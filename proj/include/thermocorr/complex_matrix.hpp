#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "thermocorr/constants.hpp"
#include "thermocorr/errors.hpp"

namespace thermocorr {

using cplx = std::complex<double>;

/// Dense complex matrix, row-major. The only matrix type in the library;
/// sized for Hilbert dimensions up to kMaxDenseDim.
class ComplexMatrix {
public:
    ComplexMatrix() = default;
    ComplexMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), a_(rows * cols, cplx{0.0, 0.0}) {}

    static ComplexMatrix identity(std::size_t n) {
        ComplexMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool square() const { return rows_ == cols_; }

    cplx& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
    const cplx& operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

    const std::vector<cplx>& data() const { return a_; }
    std::vector<cplx>& data() { return a_; }

    ComplexMatrix dagger() const {
        ComplexMatrix m(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) m(j, i) = std::conj((*this)(i, j));
        return m;
    }

    cplx trace() const {
        if (!square()) throw NotSquareError("trace: matrix not square");
        cplx t = 0.0;
        for (std::size_t i = 0; i < rows_; ++i) t += (*this)(i, i);
        return t;
    }

    double max_abs() const {
        double m = 0.0;
        for (const cplx& z : a_) m = std::max(m, std::abs(z));
        return m;
    }

    /// ||A - A^dag||_max
    double hermiticity_defect() const {
        if (!square()) throw NotSquareError("hermiticity_defect: matrix not square");
        double m = 0.0;
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = i; j < cols_; ++j)
                m = std::max(m, std::abs((*this)(i, j) - std::conj((*this)(j, i))));
        return m;
    }

    bool finite() const {
        for (const cplx& z : a_)
            if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
        return true;
    }

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<cplx> a_;
};

inline ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.cols() != b.rows()) throw DimensionMismatchError("matmul: inner dimensions differ");
    ComplexMatrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const cplx aik = a(i, k);
            if (aik == cplx{0.0, 0.0}) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
        }
    }
    return c;
}

inline ComplexMatrix operator+(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw DimensionMismatchError("add: shapes differ");
    ComplexMatrix c = a;
    for (std::size_t i = 0; i < c.rows(); ++i)
        for (std::size_t j = 0; j < c.cols(); ++j) c(i, j) += b(i, j);
    return c;
}

inline ComplexMatrix operator-(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw DimensionMismatchError("sub: shapes differ");
    ComplexMatrix c = a;
    for (std::size_t i = 0; i < c.rows(); ++i)
        for (std::size_t j = 0; j < c.cols(); ++j) c(i, j) -= b(i, j);
    return c;
}

inline ComplexMatrix operator*(cplx s, const ComplexMatrix& a) {
    ComplexMatrix c = a;
    for (auto& z : c.data()) z *= s;
    return c;
}

/// Kronecker product of a nonempty list of square matrices, left to right.
inline ComplexMatrix kron_n(const std::vector<ComplexMatrix>& factors) {
    if (factors.empty()) throw EmptyListError("kron_n: empty factor list");
    for (const auto& f : factors)
        if (!f.square()) throw NotSquareError("kron_n: factor not square");
    ComplexMatrix out = factors.front();
    for (std::size_t f = 1; f < factors.size(); ++f) {
        const ComplexMatrix& b = factors[f];
        const std::size_t ra = out.rows(), rb = b.rows();
        ComplexMatrix next(ra * rb, ra * rb);
        for (std::size_t i = 0; i < ra; ++i)
            for (std::size_t j = 0; j < ra; ++j) {
                const cplx aij = out(i, j);
                if (aij == cplx{0.0, 0.0}) continue;
                for (std::size_t k = 0; k < rb; ++k)
                    for (std::size_t l = 0; l < rb; ++l)
                        next(i * rb + k, j * rb + l) = aij * b(k, l);
            }
        out = std::move(next);
    }
    return out;
}

/// Unitary acting as identity except on the (i,j) plane, where it is
///   [[cos t, -e^{i phi} sin t], [e^{-i phi} sin t, cos t]].
inline ComplexMatrix two_level_rotation(std::size_t dim, std::size_t i, std::size_t j,
                                        double theta, double phi) {
    if (i == j || i >= dim || j >= dim)
        throw BadIndexError("two_level_rotation: need distinct indices below dim");
    ComplexMatrix u = ComplexMatrix::identity(dim);
    const double c = std::cos(theta), s = std::sin(theta);
    const cplx e = std::polar(1.0, phi);
    u(i, i) = c;
    u(i, j) = -e * s;
    u(j, i) = std::conj(e) * s;
    u(j, j) = c;
    return u;
}

/// In-place A <- U A U^dag where U differs from identity only on the (i,j) plane.
/// O(dim) instead of two dense products.
inline void apply_two_level_conjugation(ComplexMatrix& a, std::size_t i, std::size_t j,
                                        cplx uii, cplx uij, cplx uji, cplx ujj) {
    const std::size_t n = a.rows();
    for (std::size_t k = 0; k < n; ++k) { // rows: A <- U A
        const cplx ri = a(i, k), rj = a(j, k);
        a(i, k) = uii * ri + uij * rj;
        a(j, k) = uji * ri + ujj * rj;
    }
    for (std::size_t k = 0; k < n; ++k) { // cols: A <- A U^dag
        const cplx ci = a(k, i), cj = a(k, j);
        a(k, i) = ci * std::conj(uii) + cj * std::conj(uij);
        a(k, j) = ci * std::conj(uji) + cj * std::conj(ujj);
    }
}

} // namespace thermocorr
