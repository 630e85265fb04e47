#pragma once

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <set>
#include <vector>

#include "thermocorr/complex_matrix.hpp"
#include "thermocorr/eigen.hpp"
#include "thermocorr/errors.hpp"

namespace thermocorr {

/// Density matrix together with its tensor-factor dimension list.
struct DensityMatrix {
    ComplexMatrix mat;
    std::vector<std::size_t> dims;

    DensityMatrix() = default;
    DensityMatrix(ComplexMatrix m, std::vector<std::size_t> d) : mat(std::move(m)), dims(std::move(d)) {
        std::size_t prod = 1;
        for (std::size_t x : dims) prod *= x;
        if (prod != mat.rows() || !mat.square())
            throw DimensionMismatchError("DensityMatrix: matrix size does not match factor dims");
    }

    std::size_t dim() const { return mat.rows(); }
    std::size_t factors() const { return dims.size(); }
};

/// Full validity check (trace, hermiticity, positivity). Costs an eigh;
/// meant for tests and the selftest suite, not for hot paths.
inline bool validate_density(const DensityMatrix& rho, double* min_eig_out = nullptr) {
    if (!rho.mat.finite()) return false;
    if (std::abs(rho.mat.trace().real() - 1.0) > tol().trace_unit) return false;
    if (std::abs(rho.mat.trace().imag()) > tol().trace_unit) return false;
    if (rho.mat.hermiticity_defect() > tol().hermiticity) return false;
    auto eg = eigh(rho.mat);
    if (min_eig_out) *min_eig_out = eg.eigenvalues.front();
    return eg.eigenvalues.front() >= tol().psd_floor;
}

/// Trace out every factor not listed in `keep`. Kept factors appear in their
/// original relative order.
inline DensityMatrix partial_trace(const DensityMatrix& rho, const std::set<std::size_t>& keep) {
    const std::size_t nf = rho.factors();
    if (keep.empty()) throw BadIndexError("partial_trace: keep set empty");
    for (std::size_t k : keep)
        if (k >= nf) throw BadIndexError("partial_trace: factor index out of range");

    std::vector<std::size_t> kept(keep.begin(), keep.end());
    std::vector<std::size_t> traced;
    for (std::size_t i = 0; i < nf; ++i)
        if (!keep.count(i)) traced.push_back(i);

    std::size_t dk = 1, dt = 1;
    std::vector<std::size_t> kept_dims;
    for (std::size_t i : kept) {
        kept_dims.push_back(rho.dims[i]);
        dk *= rho.dims[i];
    }
    for (std::size_t i : traced) dt *= rho.dims[i];

    // strides of each factor in the global row-major index
    std::vector<std::size_t> stride(nf, 1);
    for (std::size_t i = nf; i-- > 1;) stride[i - 1] = stride[i] * rho.dims[i];

    auto global_index = [&](std::size_t kidx, std::size_t tidx) {
        std::size_t g = 0;
        for (std::size_t i = kept.size(); i-- > 0;) {
            const std::size_t f = kept[i];
            g += (kidx % rho.dims[f]) * stride[f];
            kidx /= rho.dims[f];
        }
        for (std::size_t i = traced.size(); i-- > 0;) {
            const std::size_t f = traced[i];
            g += (tidx % rho.dims[f]) * stride[f];
            tidx /= rho.dims[f];
        }
        return g;
    };

    ComplexMatrix out(dk, dk);
    for (std::size_t r = 0; r < dk; ++r)
        for (std::size_t c = 0; c < dk; ++c) {
            cplx sum = 0.0;
            for (std::size_t t = 0; t < dt; ++t) sum += rho.mat(global_index(r, t), global_index(c, t));
            out(r, c) = sum;
        }
    return DensityMatrix(std::move(out), kept_dims);
}

} // namespace thermocorr
