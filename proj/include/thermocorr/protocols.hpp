#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "thermocorr/correlations.hpp"
#include "thermocorr/density.hpp"
#include "thermocorr/entanglement.hpp"
#include "thermocorr/errors.hpp"
#include "thermocorr/thermal.hpp"

namespace thermocorr {

/// Result of running a protocol pipeline. final_state is present whenever the
/// total dimension fits the dense cap; larger systems are handled through the
/// structured representations and report measures and work only.
struct ProtocolOutcome {
    std::optional<DensityMatrix> final_state;
    double work = 0.0;
    std::map<std::string, double> measures;
};

namespace detail {

// Real orthogonal V with diag(V diag(p) V^T) = q, for q majorized by p.
// Classic rotation-chain construction: each step freezes one target entry by
// mixing an adjacent bracketing pair of the remaining diagonal values; the
// untouched submatrix stays diagonal, so the recursion is exact.
inline std::vector<std::vector<double>> schur_horn_orthogonal(const std::vector<double>& p,
                                                              const std::vector<double>& q) {
    const std::size_t d = p.size();
    std::vector<std::vector<double>> v(d, std::vector<double>(d, 0.0));
    for (std::size_t i = 0; i < d; ++i) v[i][i] = 1.0;

    std::vector<std::size_t> active(d);
    for (std::size_t i = 0; i < d; ++i) active[i] = i;
    std::vector<double> vals = p;

    std::vector<std::size_t> targets(d);
    for (std::size_t i = 0; i < d; ++i) targets[i] = i;
    std::stable_sort(targets.begin(), targets.end(),
                     [&](std::size_t x, std::size_t y) { return q[x] > q[y]; });

    std::vector<std::size_t> slot_of_target(d);
    for (std::size_t step = 0; step + 1 < d; ++step) {
        const std::size_t tpos = targets[step];
        const double qt = q[tpos];
        std::stable_sort(active.begin(), active.end(),
                         [&](std::size_t x, std::size_t y) { return vals[x] > vals[y]; });
        std::size_t j = 0;
        while (j + 1 < active.size() && vals[active[j + 1]] > qt + 1e-15) ++j;
        if (j + 1 >= active.size()) j = active.size() - 2;
        const std::size_t a = active[j], b = active[j + 1];
        const double pa = vals[a], pb = vals[b];
        const double denom = pa - pb;
        double c2 = 1.0;
        if (std::abs(denom) > 1e-300) c2 = std::clamp((qt - pb) / denom, 0.0, 1.0);
        const double c = std::sqrt(c2), s = std::sqrt(1.0 - c2);
        for (std::size_t k = 0; k < d; ++k) { // rows a,b of v <- G v
            const double ra = v[a][k], rb = v[b][k];
            v[a][k] = c * ra - s * rb;
            v[b][k] = s * ra + c * rb;
        }
        vals[a] = qt;
        vals[b] = pa + pb - qt;
        active.erase(active.begin() + static_cast<std::ptrdiff_t>(j));
        slot_of_target[tpos] = a;
    }
    slot_of_target[targets[d - 1]] = active.front();

    std::vector<std::vector<double>> out(d, std::vector<double>(d, 0.0));
    for (std::size_t t = 0; t < d; ++t) out[t] = v[slot_of_target[t]];
    return out;
}

inline std::size_t popcount_sz(std::size_t x) {
    return static_cast<std::size_t>(std::popcount(static_cast<std::uint64_t>(x)));
}

} // namespace detail

/// Columns are the generalized Bell (n = 2) or GHZ (n > 2) basis states
/// Z^{i1} (x) X^{i2} (x) ... applied to the uniform diagonal state.
inline ComplexMatrix bell_basis_unitary(std::size_t d, std::size_t n) {
    if (d < 2 || n < 2) throw PreconditionError("bell_basis_unitary: need d >= 2 and n >= 2");
    std::size_t dim = 1;
    for (std::size_t i = 0; i < n; ++i) dim *= d;
    if (dim > kMaxDenseDim) throw DimensionMismatchError("bell_basis_unitary: dimension exceeds cap");
    ComplexMatrix u(dim, dim);
    const double inv_sqrt_d = 1.0 / std::sqrt(static_cast<double>(d));
    for (std::size_t col = 0; col < dim; ++col) {
        // base-d digits (i1 ... in), i1 most significant
        std::vector<std::size_t> digits(n);
        std::size_t rest = col;
        for (std::size_t f = n; f-- > 0;) {
            digits[f] = rest % d;
            rest /= d;
        }
        for (std::size_t k = 0; k < d; ++k) {
            std::size_t row = k;
            for (std::size_t f = 1; f < n; ++f) row = row * d + (k + digits[f]) % d;
            const double phase = 2.0 * std::numbers::pi * static_cast<double>(digits[0] * k) /
                                 static_cast<double>(d);
            u(row, col) += std::polar(inv_sqrt_d, phase);
        }
    }
    return u;
}

/// rho_f = U rho_i U^dag with rho_i thermal; reports work and the standard
/// correlation measures available at the state's dimension.
inline ProtocolOutcome apply_protocol(const ComplexMatrix& u, const ThermalSystem& sys) {
    const auto ts = thermal_state(sys);
    if (u.rows() != ts.rho.dim() || !u.square())
        throw DimensionMismatchError("apply_protocol: unitary does not match system dimension");
    ProtocolOutcome out;
    DensityMatrix rho_f(u * ts.rho.mat * u.dagger(), ts.rho.dims);
    out.work = mean_energy(rho_f, sys) - mean_energy(ts.rho, sys);
    if (sys.n >= 2) out.measures["mutual_info"] = mutual_information(rho_f).value;
    if (rho_f.dim() == 4 && sys.d() == 2) out.measures["concurrence"] = concurrence_2q(rho_f);
    out.final_state = std::move(rho_f);
    return out;
}

/// Spectrum-optimal two-qubit protocol: CNOT followed by a rotation of the
/// {|00>, |11>} plane onto Bell states.
inline ProtocolOutcome verstraete_protocol(const ThermalSystem& sys) {
    if (sys.n != 2 || sys.d() != 2)
        throw PreconditionError("verstraete_protocol: two qubits required");
    ComplexMatrix v1(4, 4); // CNOT: swaps |10> and |11>
    v1(0, 0) = 1.0;
    v1(1, 1) = 1.0;
    v1(3, 2) = 1.0;
    v1(2, 3) = 1.0;
    const double r = 1.0 / std::sqrt(2.0);
    ComplexMatrix v2(4, 4); // |00> -> phi_00, |11> -> phi_10
    v2(0, 0) = r;
    v2(3, 0) = r;
    v2(1, 1) = 1.0;
    v2(2, 2) = 1.0;
    v2(0, 3) = r;
    v2(3, 3) = -r;
    return apply_protocol(v2 * v1, sys);
}

namespace detail {

// |1^j 0^(n-j)> and |0^j 1^(n-j)> as basis indices (qubit 0 = MSB)
inline std::size_t pattern_front_ones(std::size_t n, std::size_t j) {
    return ((std::size_t{1} << j) - 1) << (n - j);
}
inline std::size_t pattern_back_ones(std::size_t n, std::size_t j) {
    return (std::size_t{1} << (n - j)) - 1;
}

// Thermal population of a qubit basis state: p^n v^wt.
inline double qubit_pop(std::size_t n, double v, std::size_t idx) {
    const double p = 1.0 / (1.0 + v);
    return std::pow(p, static_cast<double>(n)) * std::pow(v, static_cast<double>(popcount_sz(idx)));
}

inline double boltzmann_v(const ThermalSystem& sys) {
    if (sys.d() != 2) throw PreconditionError("qubit protocol: qubit system required");
    return sys.ground_sentinel() ? 0.0 : std::exp(-sys.beta * sys.levels[1]);
}

// Deterministic permutation for the single-bipartition variant: place
// populations p q^{n-1} at |1...1> and at the j-pattern slot and q^n at the
// (n-j)-pattern slot. Returns (src -> dst) moves, lowest-lexicographic
// sources first.
inline std::vector<std::pair<std::size_t, std::size_t>> single_bip_moves(std::size_t n,
                                                                         std::size_t j) {
    const std::size_t dim = std::size_t{1} << n;
    const std::size_t top = dim - 1;
    const std::size_t sj = pattern_front_ones(n, j);
    const std::size_t snj = pattern_back_ones(n, j);

    // (dst, required weight class) in fixed order
    const std::pair<std::size_t, std::size_t> specials[3] = {
        {snj, n}, {top, n - 1}, {sj, n - 1}};

    std::set<std::size_t> consumed;
    std::vector<std::pair<std::size_t, std::size_t>> assign; // (src, dst)
    for (const auto& [dst, w] : specials) {
        if (popcount_sz(dst) == w && !consumed.count(dst)) {
            consumed.insert(dst);
            continue; // already holds the needed class
        }
        std::size_t src = dim; // lex-smallest unconsumed member of the class
        for (std::size_t cand : weight_class(n, w))
            if (!consumed.count(cand)) {
                src = cand;
                break;
            }
        if (src == dim) throw PreconditionError("single_bip_moves: weight class exhausted");
        consumed.insert(src);
        assign.emplace_back(src, dst);
    }
    // close the permutation: displaced old values go to the vacated sources
    std::set<std::size_t> dsts;
    for (const auto& [s, t] : assign) dsts.insert(t);
    std::vector<std::size_t> vacated, displaced;
    for (const auto& [s, t] : assign) {
        if (!dsts.count(s)) vacated.push_back(s);
        if (!consumed.count(t)) displaced.push_back(t);
    }
    std::sort(vacated.begin(), vacated.end());
    std::sort(displaced.begin(), displaced.end());
    for (std::size_t i = 0; i < vacated.size(); ++i) assign.emplace_back(displaced[i], vacated[i]);
    return assign;
}

} // namespace detail

/// 2 (|<0...0| rho |1...1>| - sqrt(rho_sj rho_snj)) across the bipartition
/// j | n-j; tight for the corner-supported states these protocols produce.
inline double bipartition_corner_bound(const DensityMatrix& rho, std::size_t n, std::size_t j) {
    const std::size_t dim = std::size_t{1} << n;
    if (rho.dim() != dim) throw DimensionMismatchError("bipartition_corner_bound: dim mismatch");
    if (j < 1 || j >= n) throw BadIndexError("bipartition_corner_bound: j in [1, n-1]");
    const std::size_t sj = detail::pattern_front_ones(n, j);
    const std::size_t snj = detail::pattern_back_ones(n, j);
    return 2.0 * (std::abs(rho.mat(0, dim - 1)) -
                  std::sqrt(std::max(0.0, rho.mat(sj, sj).real()) *
                            std::max(0.0, rho.mat(snj, snj).real())));
}

/// GHZ-subspace protocol: optional diagonal permutation (single-bip variant),
/// then the rotation |0...0>, |1...1> -> phi^n, phi^n'. For n beyond the dense
/// cap only work and measures are reported.
inline ProtocolOutcome ghz_subspace_protocol(const ThermalSystem& sys, BipartitionVariant variant,
                                             std::size_t j = 1) {
    const double v = detail::boltzmann_v(sys);
    const std::size_t n = sys.n;
    if (n < 2) throw PreconditionError("ghz_subspace_protocol: n >= 2");
    if (variant == BipartitionVariant::SingleBipartition && (j < 1 || j >= n))
        throw BadIndexError("ghz_subspace_protocol: bipartition j in [1, n-1]");
    const double E = sys.levels[1];
    const double p = 1.0 / (1.0 + v);

    std::vector<std::pair<std::size_t, std::size_t>> moves;
    if (variant == BipartitionVariant::SingleBipartition) moves = detail::single_bip_moves(n, j);

    // populations at the rotation corner after the permutation
    const std::size_t dim_bits = n;
    const std::size_t top = (std::size_t{1} << dim_bits) - 1;
    auto pop_after = [&](std::size_t idx) {
        for (const auto& [src, dst] : moves)
            if (dst == idx) return detail::qubit_pop(n, v, src);
        return detail::qubit_pop(n, v, idx);
    };
    const double lam0 = pop_after(0);
    const double lamn = pop_after(top);

    ProtocolOutcome out;
    // permutation work + rotation work (corner populations averaged)
    double w = 0.0;
    for (const auto& [src, dst] : moves)
        w += E * (static_cast<double>(detail::popcount_sz(dst)) -
                  static_cast<double>(detail::popcount_sz(src))) *
             detail::qubit_pop(n, v, src);
    w += static_cast<double>(n) * E * (lam0 - lamn) / 2.0;
    out.work = w;

    if (variant == BipartitionVariant::AllBipartitions) {
        out.measures["concurrence"] = detail::bipartition_concurrence_raw(
            p, n, BipartitionVariant::AllBipartitions);
        const double z = (lam0 - lamn) / 2.0;
        const double wsum = (std::pow(2.0, static_cast<double>(n - 1)) - 1.0) *
                            std::pow(p, static_cast<double>(n)) *
                            std::pow(v, static_cast<double>(n) / 2.0);
        out.measures["gme_concurrence"] = 2.0 * std::max(0.0, z - wsum);
    } else {
        const double lam_j = pop_after(detail::pattern_front_ones(n, j));
        const double lam_nj = pop_after(detail::pattern_back_ones(n, j));
        out.measures["concurrence"] = lam0 - lamn - 2.0 * std::sqrt(lam_j * lam_nj);
    }

    const std::size_t dim = std::size_t{1} << n;
    if (dim <= kMaxDenseDim) {
        std::vector<double> pops(dim);
        for (std::size_t i = 0; i < dim; ++i) pops[i] = detail::qubit_pop(n, v, i);
        std::vector<double> perm = pops;
        for (const auto& [src, dst] : moves) perm[dst] = pops[src];
        ComplexMatrix m(dim, dim);
        for (std::size_t i = 0; i < dim; ++i) m(i, i) = perm[i];
        m(0, 0) = (perm[0] + perm[dim - 1]) / 2.0;
        m(dim - 1, dim - 1) = m(0, 0);
        m(0, dim - 1) = (perm[0] - perm[dim - 1]) / 2.0;
        m(dim - 1, 0) = m(0, dim - 1);
        out.final_state = DensityMatrix(std::move(m), std::vector<std::size_t>(n, 2));
    }
    return out;
}

/// X-state protocol: Bell rotation of the (ground, top) pair, the remaining
/// thermal diagonal already pairs largest with smallest across the
/// anti-diagonal. Reports the X-state GME concurrence.
inline ProtocolOutcome xstate_protocol(const ThermalSystem& sys) {
    const double v = detail::boltzmann_v(sys);
    const std::size_t n = sys.n;
    if (n < 2) throw PreconditionError("xstate_protocol: n >= 2");
    if (n > 22) throw DimensionMismatchError("xstate_protocol: X-state lists capped at n = 22");
    const double E = sys.levels[1];

    const std::size_t half = std::size_t{1} << (n - 1);
    const std::size_t mask = (std::size_t{1} << n) - 1;
    std::vector<double> a(half), b(half);
    std::vector<cplx> z(half, cplx{0.0, 0.0});
    for (std::size_t i = 0; i < half; ++i) {
        a[i] = detail::qubit_pop(n, v, i);
        b[i] = detail::qubit_pop(n, v, ~i & mask);
    }
    const double lam0 = a[0], lamn = b[0];
    z[0] = (lam0 - lamn) / 2.0;
    a[0] = (lam0 + lamn) / 2.0;
    b[0] = a[0];
    XStateParams x(std::move(a), std::move(b), std::move(z));

    ProtocolOutcome out;
    out.work = static_cast<double>(n) * E * (lam0 - lamn) / 2.0;
    out.measures["gme_concurrence"] = xstate_gme_concurrence(x);

    const std::size_t dim = std::size_t{1} << n;
    if (dim <= kMaxDenseDim) {
        ComplexMatrix m(dim, dim);
        for (std::size_t i = 0; i < dim; ++i) m(i, i) = detail::qubit_pop(n, v, i);
        m(0, 0) = (lam0 + lamn) / 2.0;
        m(dim - 1, dim - 1) = m(0, 0);
        m(0, dim - 1) = (lam0 - lamn) / 2.0;
        m(dim - 1, 0) = m(0, dim - 1);
        out.final_state = DensityMatrix(std::move(m), std::vector<std::size_t>(n, 2));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Dicke / W-state protocol
// ---------------------------------------------------------------------------

/// Permutation plan for the Dicke protocol: which populations move where.
/// Fill sources are whole weight classes; a fill is skipped when its class
/// would collide with the target band {k-1, k, k+1}, the ground state, or the
/// reserved top state.
struct DickeFillPlan {
    std::size_t n = 0, k = 1;
    std::size_t k_fill = 0, m_fill = 0; // resolved exponents; 0 = skipped
    std::vector<std::pair<std::size_t, std::size_t>> moves; // (src, dst)
};

namespace detail {

inline DickeFillPlan build_dicke_plan(std::size_t n, std::size_t k, std::size_t k_fill,
                                      std::size_t m_fill, bool strict) {
    if (k < 1 || k > n - 1) throw BadExcitationError("dicke plan: need 1 <= k <= n-1");
    DickeFillPlan plan;
    plan.n = n;
    plan.k = k;
    const std::size_t dim = std::size_t{1} << n;
    const std::size_t top = dim - 1;
    const auto dk = weight_class(n, k);

    if (k == 1) {
        // 3-cycle: dominant to W1, its occupant to the top, the smallest to the ground
        plan.moves.emplace_back(0, dk[0]);
        plan.moves.emplace_back(dk[0], top);
        plan.moves.emplace_back(top, 0);
    } else {
        plan.moves.emplace_back(0, dk[0]);
        plan.moves.emplace_back(dk[0], 0);
    }

    auto excluded = [&](std::size_t w) {
        if (w == 0 || (w + 1 >= k && w <= k + 1)) return true; // band k-1..k+1 and ground
        if (k == 1 && w == n) return true;                     // reserved for the ground move
        return false;
    };

    const std::size_t wk = n - k_fill;
    std::size_t used_k = 0;
    if (k_fill > 0 && !excluded(wk)) {
        const auto srcs = weight_class(n, wk);
        if (srcs.size() < dk.size() - 1) {
            if (strict) throw FillTooLargeError("dicke plan: k_fill class smaller than subspace");
        } else {
            for (std::size_t i = 1; i < dk.size(); ++i) {
                plan.moves.emplace_back(srcs[i - 1], dk[i]);
                plan.moves.emplace_back(dk[i], srcs[i - 1]);
            }
            plan.k_fill = k_fill;
            used_k = dk.size() - 1;
        }
    } else if (k_fill > 0 && strict) {
        throw FillTooLargeError("dicke plan: k_fill class collides with the target band");
    }
    (void)used_k;

    const std::size_t wm = n - m_fill;
    if (m_fill > 0 && !excluded(wm) && wm != wk) {
        std::vector<std::size_t> nb;
        if (k >= 2) {
            const auto dkm = weight_class(n, k - 1);
            nb.insert(nb.end(), dkm.begin(), dkm.end());
        }
        const auto dkp = weight_class(n, k + 1);
        nb.insert(nb.end(), dkp.begin(), dkp.end());
        const auto srcs = weight_class(n, wm);
        if (srcs.size() < nb.size() && strict)
            throw FillTooLargeError("dicke plan: m_fill class smaller than the neighbor subspaces");
        const std::size_t count = std::min(srcs.size(), nb.size());
        for (std::size_t i = 0; i < count; ++i) {
            plan.moves.emplace_back(srcs[i], nb[i]);
            plan.moves.emplace_back(nb[i], srcs[i]);
        }
        if (count > 0) plan.m_fill = m_fill;
    } else if (m_fill > 0 && wm != wk && strict) {
        throw FillTooLargeError("dicke plan: m_fill class collides with the target band");
    }
    return plan;
}

} // namespace detail

/// Structured description of the Dicke protocol output: everything the
/// witness and the work cost need, without the 2^n-dimensional state.
struct DickeOutcomeDetail {
    DickeFillPlan plan;
    double alpha = 0.0;   // trace in D_k after the permutation
    double lam = 0.0;     // normalized purity of the D_k block
    WSubspaceState form;  // realized optimal-form block (phases zero)
    bool form_psd = true;
    double witness = 0.0; // structured evaluation of the Dicke witness
    double work = 0.0;
};

namespace detail {

inline DickeOutcomeDetail dicke_structured(const ThermalSystem& sys, std::size_t k,
                                           std::size_t k_fill, std::size_t m_fill, bool strict) {
    const double v = boltzmann_v(sys);
    const std::size_t n = sys.n;
    const double E = sys.levels[1];
    DickeOutcomeDetail det;
    det.plan = build_dicke_plan(n, k, k_fill, m_fill, strict);

    auto pop = [&](std::size_t idx) { return qubit_pop(n, v, idx); };
    std::map<std::size_t, double> moved;
    for (const auto& [src, dst] : det.plan.moves) moved[dst] = pop(src);
    auto cur = [&](std::size_t idx) {
        auto it = moved.find(idx);
        return it == moved.end() ? pop(idx) : it->second;
    };

    const auto dk = weight_class(n, k);
    const std::size_t N = dk.size();
    double alpha = 0.0, purity = 0.0;
    for (std::size_t slot : dk) {
        const double x = cur(slot);
        alpha += x;
        purity += x * x;
    }
    det.alpha = alpha;
    det.lam = alpha > 0.0 ? purity / (alpha * alpha) : 1.0;
    det.form = make_optimal_form(alpha, det.lam, N);
    det.form_psd = det.lam <= 1.0 + 1e-12;
    if (N <= 64) { // numeric PSD check where affordable
        auto eg = eigh(det.form.offdiag);
        det.form_psd = det.form_psd && eg.eigenvalues.front() >= tol().psd_floor * std::max(1.0, alpha);
    }

    // witness on the rotated state: all relevant off-diagonals share the
    // magnitude alpha * s of the optimal form
    const double nn = static_cast<double>(n), kk = static_cast<double>(k), NN = static_cast<double>(N);
    const double off = alpha * std::sqrt(std::max(0.0, (det.lam - 1.0 / NN) / (NN * (NN - 1.0))));
    double witness = kk * (nn - kk) * NN * off;
    for (std::size_t A : dk)
        for (std::size_t B : dk) {
            if (A == B || popcount_sz(A & B) != k - 1) continue;
            witness -= std::sqrt(cur(A & B) * cur(A | B));
        }
    witness -= kk * (nn - kk - 1.0) * alpha;
    det.witness = witness;

    double w = 0.0;
    for (const auto& [src, dst] : det.plan.moves)
        w += E * (static_cast<double>(popcount_sz(dst)) - static_cast<double>(popcount_sz(src))) *
             pop(src);
    det.work = w;
    return det;
}

} // namespace detail

/// Dicke-state protocol: permutation purifying the k-excitation subspace,
/// then a rotation of that degenerate subspace onto the Dicke state plus the
/// discrete-Fourier family of orthonormal companions. k_fill / m_fill choose
/// the population classes p^n v^{n-k_fill} and p^n v^{n-m_fill} used to fill
/// the target and neighbor subspaces; 0 selects the defaults (k_fill = k,
/// m_fill = 2 for k = 1, k + 2 otherwise) with collision fills skipped.
inline ProtocolOutcome dicke_protocol(const ThermalSystem& sys, std::size_t k,
                                      std::size_t k_fill = 0, std::size_t m_fill = 0) {
    const std::size_t n = sys.n;
    if (k < 1 || k > n - 1) throw BadExcitationError("dicke_protocol: need 1 <= k <= n-1");
    const bool strict = (k_fill != 0 || m_fill != 0);
    if (k_fill == 0) k_fill = k;
    if (m_fill == 0) m_fill = (k == 1) ? 2 : k + 2;
    auto det = detail::dicke_structured(sys, k, k_fill, m_fill, strict);

    ProtocolOutcome out;
    out.work = det.work;
    out.measures["witness"] = det.witness;

    const std::size_t dim = std::size_t{1} << n;
    if (dim <= kMaxDenseDim) {
        const double v = detail::boltzmann_v(sys);
        std::vector<double> pops(dim);
        for (std::size_t i = 0; i < dim; ++i) pops[i] = detail::qubit_pop(n, v, i);
        std::vector<double> perm = pops;
        for (const auto& [src, dst] : det.plan.moves) perm[dst] = pops[src];

        ComplexMatrix m(dim, dim);
        for (std::size_t i = 0; i < dim; ++i) m(i, i) = perm[i];
        const auto dk = detail::weight_class(n, k);
        const std::size_t N = dk.size();
        for (std::size_t i = 0; i < N; ++i) m(dk[i], dk[i]) = 0.0;
        // rho_block = sum_l pop_l |col_l><col_l| with DFT columns
        for (std::size_t l = 0; l < N; ++l) {
            const double pl = perm[dk[l]];
            if (pl == 0.0) continue;
            for (std::size_t a = 0; a < N; ++a)
                for (std::size_t b = 0; b < N; ++b) {
                    const double ph = 2.0 * std::numbers::pi * static_cast<double>(l) *
                                      (static_cast<double>(a) - static_cast<double>(b)) /
                                      static_cast<double>(N);
                    m(dk[a], dk[b]) += std::polar(pl / static_cast<double>(N), ph);
                }
        }
        out.final_state = DensityMatrix(std::move(m), std::vector<std::size_t>(n, 2));
    }
    return out;
}

/// Structured-path access for threshold scans and tests.
inline DickeOutcomeDetail dicke_protocol_detail(const ThermalSystem& sys, std::size_t k,
                                                std::size_t k_fill = 0, std::size_t m_fill = 0) {
    const bool strict = (k_fill != 0 || m_fill != 0);
    if (k_fill == 0) k_fill = k;
    if (m_fill == 0) m_fill = (k == 1) ? 2 : k + 2;
    return detail::dicke_structured(sys, k, k_fill, m_fill, strict);
}

// ---------------------------------------------------------------------------
// Circulant marginal-heating protocol (two equally spaced qudits)
// ---------------------------------------------------------------------------

/// Convex weights over cyclic shifts: the doubly stochastic marginal map is
/// T = sum_k alphas[k] Pi^k with Pi moving population one level up.
struct CirculantPlan {
    std::vector<double> alphas;

    explicit CirculantPlan(std::vector<double> a) : alphas(std::move(a)) {
        double sum = 0.0;
        for (double x : alphas) {
            if (x < -1e-12) throw NegativeAlphaError("CirculantPlan: negative weight");
            sum += x;
        }
        if (std::abs(sum - 1.0) > tol().trace_unit)
            throw NegativeAlphaError("CirculantPlan: weights must sum to 1");
    }
};

/// Closed-form plan for equal level spacing, in terms of the Boltzmann
/// factors v = e^{-beta E0} and v' = e^{-beta' E0}:
///   alpha_0 = ((1 - v') + (v' - v) p'_{d-1}) / (1 - v)
///   alpha_k = (v' - v) p'_{k-1} / (1 - v),   k >= 1.
inline CirculantPlan circulant_plan_closed_form(std::size_t d, double v, double v_prime) {
    if (d < 2) throw PreconditionError("circulant_plan_closed_form: d >= 2");
    if (v > 1.0 || v_prime > 1.0 || v_prime < v)
        throw PreconditionError("circulant_plan_closed_form: need v <= v' <= 1");
    if (v_prime == v) { // identity map, covers the beta = 0 edge exactly
        std::vector<double> a(d, 0.0);
        a[0] = 1.0;
        return CirculantPlan(std::move(a));
    }
    double zp = 0.0;
    std::vector<double> pp(d);
    for (std::size_t j = 0; j < d; ++j) zp += std::pow(v_prime, static_cast<double>(j));
    for (std::size_t j = 0; j < d; ++j) pp[j] = std::pow(v_prime, static_cast<double>(j)) / zp;
    std::vector<double> a(d);
    a[0] = ((1.0 - v_prime) + (v_prime - v) * pp[d - 1]) / (1.0 - v);
    for (std::size_t kk = 1; kk < d; ++kk) a[kk] = (v_prime - v) * pp[kk - 1] / (1.0 - v);
    for (double x : a)
        if (x < tol().alpha_floor)
            throw NegativeAlphaError("circulant_plan_closed_form: coefficient below zero");
    return CirculantPlan(std::move(a));
}

namespace detail {

// Gaussian elimination with partial pivoting; a is modified.
inline std::vector<double> solve_linear(std::vector<std::vector<double>> a, std::vector<double> rhs) {
    const std::size_t d = rhs.size();
    for (std::size_t col = 0; col < d; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < d; ++r)
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
        std::swap(a[piv], a[col]);
        std::swap(rhs[piv], rhs[col]);
        if (std::abs(a[col][col]) < 1e-300) throw Error("solve_linear: singular system");
        for (std::size_t r = 0; r < d; ++r) {
            if (r == col) continue;
            const double f = a[r][col] / a[col][col];
            if (f == 0.0) continue;
            for (std::size_t c = col; c < d; ++c) a[r][c] -= f * a[col][c];
            rhs[r] -= f * rhs[col];
        }
    }
    for (std::size_t i = 0; i < d; ++i) rhs[i] /= a[i][i];
    return rhs;
}

} // namespace detail

/// General-Hamiltonian feasibility route: solve the cyclic linear system
/// sum_k alpha_k p_{(x-k) mod d}(beta) = p_x(beta') directly and accept when
/// every coefficient is nonnegative within tolerance.
inline CirculantPlan circulant_plan_solve(const std::vector<double>& levels, double beta,
                                          double beta_prime) {
    const std::size_t d = levels.size();
    ThermalSystem cold(1, levels, beta), hot(1, levels, beta_prime);
    const auto p = cold.local_populations();
    const auto pp = hot.local_populations();
    std::vector<std::vector<double>> a(d, std::vector<double>(d, 0.0));
    for (std::size_t x = 0; x < d; ++x)
        for (std::size_t kk = 0; kk < d; ++kk) a[x][kk] = p[(x + d - kk) % d];
    auto alphas = detail::solve_linear(std::move(a), pp);
    for (double x : alphas)
        if (x < tol().alpha_floor)
            throw NegativeAlphaError("circulant_plan_solve: circulant map infeasible");
    return CirculantPlan(std::move(alphas));
}

/// Marginal-heating protocol for two equally spaced qudits: block rotations
/// inside the generalized-Bell subspaces steer both marginals exactly to
/// tau_beta', realizing the mutual-information bound at this energy cost.
inline ProtocolOutcome circulant_heating_protocol(const ThermalSystem& sys, double beta_prime) {
    if (sys.n != 2) throw PreconditionError("circulant_heating_protocol: two subsystems required");
    if (!(beta_prime <= sys.beta)) throw PreconditionError("circulant_heating_protocol: beta' <= beta");
    const std::size_t d = sys.d();
    const double e0 = sys.levels[1];
    for (std::size_t kk = 0; kk < d; ++kk)
        if (std::abs(sys.levels[kk] - static_cast<double>(kk) * e0) > 1e-9 * std::max(1.0, e0))
            throw NotEqualSpacingError("circulant_heating_protocol: levels must be k * E0");

    const double v = sys.ground_sentinel() ? 0.0 : std::exp(-sys.beta * e0);
    const double vp = std::exp(-beta_prime * e0);
    const auto plan = circulant_plan_closed_form(d, v, vp);

    const auto P = sys.local_populations();
    const std::size_t dim = d * d;
    if (dim > kMaxDenseDim) throw DimensionMismatchError("circulant_heating_protocol: dim cap");

    ComplexMatrix rho_f(dim, dim);
    for (std::size_t shift = 0; shift < d; ++shift) {
        std::vector<std::size_t> idx(d);
        std::vector<double> pvec(d), qvec(d, 0.0);
        for (std::size_t jrow = 0; jrow < d; ++jrow) {
            idx[jrow] = jrow * d + (jrow + shift) % d;
            pvec[jrow] = P[jrow] * P[(jrow + shift) % d];
        }
        for (std::size_t x = 0; x < d; ++x)
            for (std::size_t kk = 0; kk < d; ++kk)
                qvec[x] += plan.alphas[kk] * pvec[(x + d - kk) % d];
        const auto vblock = detail::schur_horn_orthogonal(pvec, qvec);
        // sector block of rho_f = V diag(pvec) V^T
        for (std::size_t r = 0; r < d; ++r)
            for (std::size_t c = 0; c < d; ++c) {
                double sum = 0.0;
                for (std::size_t kk = 0; kk < d; ++kk) sum += vblock[r][kk] * pvec[kk] * vblock[c][kk];
                rho_f(idx[r], idx[c]) = sum;
            }
    }

    DensityMatrix rf(std::move(rho_f), {d, d});
    ProtocolOutcome out;
    out.work = mean_energy(rf, sys) - 2.0 * sys.local_mean_energy();
    out.measures["mutual_info"] = mutual_information(rf).value;
    out.final_state = std::move(rf);
    return out;
}

} // namespace thermocorr
