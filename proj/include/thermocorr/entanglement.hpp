#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include "thermocorr/density.hpp"
#include "thermocorr/eigen.hpp"
#include "thermocorr/errors.hpp"

namespace thermocorr {

/// State spectrum sorted non-increasing, summing to one.
struct SpectrumVector {
    std::vector<double> values;

    explicit SpectrumVector(std::vector<double> v) : values(std::move(v)) {
        std::sort(values.begin(), values.end(), std::greater<double>());
        double sum = 0.0;
        for (double x : values) {
            if (x < -1e-12) throw PreconditionError("SpectrumVector: negative weight");
            sum += x;
        }
        if (std::abs(sum - 1.0) > tol().trace_unit)
            throw PreconditionError("SpectrumVector: weights must sum to 1");
    }
};

namespace detail {

inline ComplexMatrix sqrt_psd(const ComplexMatrix& a) {
    auto eg = eigh(a);
    const std::size_t n = a.rows();
    ComplexMatrix out(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        const double lam = std::max(0.0, eg.eigenvalues[k]);
        const double r = std::sqrt(lam);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                out(i, j) += r * eg.eigenvectors(i, k) * std::conj(eg.eigenvectors(j, k));
    }
    return out;
}

// spin-flipped state (sigma_y x sigma_y) rho^* (sigma_y x sigma_y)
inline ComplexMatrix spin_flip_2q(const ComplexMatrix& rho) {
    // (YY)_{ij}: YY|00> = -|11>, YY|01> = |10>, YY|10> = |01>, YY|11> = -|00>
    static const int perm[4] = {3, 2, 1, 0};
    static const double sign[4] = {-1.0, 1.0, 1.0, -1.0};
    ComplexMatrix out(4, 4);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            out(i, j) = sign[i] * sign[j] * std::conj(rho(perm[i], perm[j]));
    return out;
}

} // namespace detail

/// Wootters concurrence of a two-qubit state via the spin-flip construction.
/// The mu_i are obtained as square roots of the eigenvalues of the Hermitian
/// matrix sqrt(rho) rho~ sqrt(rho), which has the same spectrum as rho rho~.
inline double concurrence_2q(const DensityMatrix& rho) {
    if (rho.dim() != 4) throw DimensionMismatchError("concurrence_2q: need a two-qubit state");
    const ComplexMatrix flip = detail::spin_flip_2q(rho.mat);
    const ComplexMatrix root = detail::sqrt_psd(rho.mat);
    auto eg = eigh(root * flip * root);
    double mu[4];
    for (int i = 0; i < 4; ++i) mu[i] = std::sqrt(std::max(0.0, eg.eigenvalues[3 - i]));
    return std::max(0.0, mu[0] - mu[1] - mu[2] - mu[3]);
}

/// Largest concurrence reachable on the unitary orbit of a two-qubit state
/// with the given spectrum: max(0, l1 - l3 - 2 sqrt(l2 l4)).
inline double cmax_from_spectrum(const SpectrumVector& spec) {
    if (spec.values.size() != 4) throw DimensionMismatchError("cmax_from_spectrum: need 4 weights");
    const auto& l = spec.values;
    return std::max(0.0, l[0] - l[2] - 2.0 * std::sqrt(std::max(0.0, l[1] * l[3])));
}

namespace detail {
// unclamped form of the thermal two-qubit optimum, used for root finding
inline double cmax_thermal_2q_raw(double p) {
    return 2.0 * p * p - p - 2.0 * (1.0 - p) * std::sqrt(std::max(0.0, p * (1.0 - p)));
}
} // namespace detail

/// Thermal two-qubit optimum max(0, 2p^2 - p - 2(1-p) sqrt(p(1-p))).
inline double cmax_thermal_2q(double p) {
    if (p < 0.5 || p > 1.0) throw PreconditionError("cmax_thermal_2q: p must lie in [1/2, 1]");
    return std::max(0.0, detail::cmax_thermal_2q_raw(p));
}

enum class BipartitionVariant { AllBipartitions, SingleBipartition };

namespace detail {
// unclamped bipartition expressions; thresholds bisect these
inline double bipartition_concurrence_raw(double p, std::size_t n, BipartitionVariant variant) {
    const double q = 1.0 - p;
    const double nn = static_cast<double>(n);
    if (variant == BipartitionVariant::AllBipartitions)
        return std::pow(p, nn) - std::pow(q, nn) -
               2.0 * std::pow(p, nn / 2.0) * std::pow(q, nn / 2.0);
    const double lam_n = p * std::pow(q, nn - 1.0);
    return std::pow(p, nn) - lam_n - 2.0 * std::sqrt(lam_n * std::pow(q, nn));
}
} // namespace detail

/// Concurrence across a bipartition after the GHZ-subspace protocol:
/// l0 - ln - 2 sqrt(lj l(n-j)) evaluated on the thermal populations (all-bip)
/// or on the optimal permutation (single-bip).
inline double bipartition_concurrence(double p, std::size_t n, BipartitionVariant variant) {
    if (p < 0.5 || p > 1.0) throw PreconditionError("bipartition_concurrence: p in [1/2, 1]");
    if (n < 2) throw PreconditionError("bipartition_concurrence: n >= 2");
    return detail::bipartition_concurrence_raw(p, n, variant);
}

/// X-state description: anti-diagonal pairs (a_i, b_i) with coherence z_i.
struct XStateParams {
    std::vector<double> a, b;
    std::vector<cplx> z;

    XStateParams(std::vector<double> a_, std::vector<double> b_, std::vector<cplx> z_)
        : a(std::move(a_)), b(std::move(b_)), z(std::move(z_)) {
        if (a.size() != b.size() || a.size() != z.size() || a.empty())
            throw InvalidXStateError("XStateParams: triplet lists must have equal nonzero length");
        double sum = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (a[i] < -1e-12 || b[i] < -1e-12)
                throw InvalidXStateError("XStateParams: negative diagonal weight");
            if (std::abs(z[i]) > std::sqrt(std::max(0.0, a[i] * b[i])) + 1e-12)
                throw InvalidXStateError("XStateParams: |z_i| exceeds sqrt(a_i b_i)");
            sum += a[i] + b[i];
        }
        if (std::abs(sum - 1.0) > tol().trace_unit)
            throw InvalidXStateError("XStateParams: diagonal must sum to 1");
    }
};

/// Genuine multipartite concurrence of an X-state:
/// max_i 2 max(0, |z_i| - sum_{j != i} sqrt(a_j b_j)).
inline double xstate_gme_concurrence(const XStateParams& x) {
    std::vector<double> s(x.a.size());
    double total = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        s[i] = std::sqrt(std::max(0.0, x.a[i] * x.b[i]));
        total += s[i];
    }
    double best = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i)
        best = std::max(best, 2.0 * std::max(0.0, std::abs(x.z[i]) - (total - s[i])));
    return best;
}

/// Projection of a state onto the first-excitation subspace, in the optimal
/// equal-off-diagonal form: alpha/n on the diagonal and
/// alpha sqrt((lam - 1/n)/(n(n-1))) off-diagonal (all phases zero).
struct WSubspaceState {
    double alpha = 1.0; // trace inside the subspace
    double lam = 1.0;   // normalized purity, in [1/n, 1]
    ComplexMatrix offdiag;
};

/// The optimal-form matrix for given subspace trace and purity; PSD whenever
/// lam <= 1 since the off-diagonal magnitude stays below alpha/n.
inline WSubspaceState make_optimal_form(double alpha, double lam, std::size_t n) {
    if (n < 2) throw PreconditionError("make_optimal_form: subspace dimension >= 2");
    WSubspaceState w;
    w.alpha = alpha;
    w.lam = lam;
    const double nn = static_cast<double>(n);
    const double off = alpha * std::sqrt(std::max(0.0, (lam - 1.0 / nn) / (nn * (nn - 1.0))));
    w.offdiag = ComplexMatrix(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) w.offdiag(i, j) = (i == j) ? alpha / nn : off;
    return w;
}

namespace detail {

// basis indices with the given Hamming weight, ascending (= lexicographic
// bitstring order with qubit 0 as the most significant bit); Gosper's hack
inline std::vector<std::size_t> weight_class(std::size_t n, std::size_t w) {
    std::vector<std::size_t> out;
    if (w > n) return out;
    if (w == 0) {
        out.push_back(0);
        return out;
    }
    const std::size_t limit = std::size_t{1} << n;
    std::size_t x = (std::size_t{1} << w) - 1;
    while (x < limit) {
        out.push_back(x);
        const std::size_t c = x & (~x + 1);
        const std::size_t r = x + c;
        x = (((x ^ r) >> 2) / c) | r;
    }
    return out;
}

inline std::size_t binomial(std::size_t n, std::size_t k) {
    if (k > n) return 0;
    k = std::min(k, n - k);
    std::size_t r = 1;
    for (std::size_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

} // namespace detail

/// GME witness built on the first-excitation subspace W1:
///   sum_{i != j} |O_ij| - 2 sqrt(O_00) sum_a sqrt(O_aa) - (n-2) sum_i O_ii,
/// with O_ij over W1 and O_aa over the two-excitation diagonal. Positive
/// values certify genuine multipartite entanglement.
inline double w_witness(const DensityMatrix& rho, std::size_t n) {
    if (rho.dim() != (std::size_t{1} << n))
        throw DimensionMismatchError("w_witness: state dimension is not 2^n");
    const auto w1 = detail::weight_class(n, 1);
    const auto w2 = detail::weight_class(n, 2);
    double off = 0.0, diag = 0.0, second = 0.0;
    for (std::size_t i = 0; i < w1.size(); ++i) {
        diag += rho.mat(w1[i], w1[i]).real();
        for (std::size_t j = 0; j < w1.size(); ++j)
            if (i != j) off += std::abs(rho.mat(w1[i], w1[j]));
    }
    for (std::size_t a : w2) second += std::sqrt(std::max(0.0, rho.mat(a, a).real()));
    const double ground = std::sqrt(std::max(0.0, rho.mat(0, 0).real()));
    return off - 2.0 * ground * second - (static_cast<double>(n) - 2.0) * diag;
}

/// Dicke-subspace GME witness for m excitations. The pair set {gamma} runs
/// over ordered (A, B) in the m-excitation subspace with |A & B| = m-1; the
/// swap operator sends the pair diagonally to D_{m-1} x D_{m+1}. The diagonal
/// penalty coefficient is m(n-m-1); m = 1 reduces to w_witness.
inline double dicke_witness(const DensityMatrix& rho, std::size_t n, std::size_t m) {
    if (m < 1 || m > n - 1) throw BadExcitationError("dicke_witness: need 1 <= m <= n-1");
    if (rho.dim() != (std::size_t{1} << n))
        throw DimensionMismatchError("dicke_witness: state dimension is not 2^n");
    const auto dm = detail::weight_class(n, m);
    double total = 0.0, diag = 0.0;
    for (std::size_t a : dm) diag += rho.mat(a, a).real();
    for (std::size_t A : dm) {
        for (std::size_t B : dm) {
            if (A == B) continue;
            if (static_cast<std::size_t>(std::popcount(static_cast<std::uint64_t>(A & B))) != m - 1)
                continue;
            total += std::abs(rho.mat(A, B));
            const std::size_t lo = A & B, hi = A | B;
            total -= std::sqrt(std::max(0.0, rho.mat(lo, lo).real()) *
                               std::max(0.0, rho.mat(hi, hi).real()));
        }
    }
    return total - static_cast<double>(m) * (static_cast<double>(n) - static_cast<double>(m) - 1.0) * diag;
}

} // namespace thermocorr
