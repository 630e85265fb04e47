#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <string>

#include "thermocorr/entanglement.hpp"
#include "thermocorr/errors.hpp"
#include "thermocorr/protocols.hpp"

namespace thermocorr {

enum class ThresholdFamily {
    TwoQubit,
    AllBipartitions,
    SingleBipartition,
    GmeGhz,
    GmeDicke,
    UpperQubitQudit,
};

inline const char* to_string(ThresholdFamily f) {
    switch (f) {
        case ThresholdFamily::TwoQubit: return "two-qubit";
        case ThresholdFamily::AllBipartitions: return "all-bip";
        case ThresholdFamily::SingleBipartition: return "single-bip";
        case ThresholdFamily::GmeGhz: return "gme-ghz";
        case ThresholdFamily::GmeDicke: return "gme-dicke";
        case ThresholdFamily::UpperQubitQudit: return "upper-qubit-qudit";
    }
    return "?";
}

struct ThresholdResult {
    ThresholdFamily family = ThresholdFamily::TwoQubit;
    std::size_t n = 2;
    std::optional<std::size_t> k;
    double kT_over_E = 0.0;
    double residual = 0.0;
    int iterations = 0;
    double p_root = 0.0; // ground-state population at the root, when applicable
};

namespace detail {

inline double kT_from_p(double p) { return 1.0 / std::log(p / (1.0 - p)); }

// Bisection for the largest sign change of f on [lo, hi]; requires
// f(lo) <= 0 <= f(hi) or the reverse. Maintains the bracket each step.
struct RootInfo {
    double root;
    double residual;
    int iterations;
};

inline RootInfo bisect(const std::function<double(double)>& f, double lo, double hi) {
    double flo = f(lo), fhi = f(hi);
    if (flo == 0.0) return {lo, 0.0, 0};
    if (fhi == 0.0) return {hi, 0.0, 0};
    if ((flo > 0.0) == (fhi > 0.0)) throw Error("bisect: no sign change on the bracket");
    double mid = 0.5 * (lo + hi), fmid = 0.0;
    int it = 0;
    for (; it < tol().bisection_max_iters; ++it) {
        mid = 0.5 * (lo + hi);
        fmid = f(mid);
        if (std::abs(fmid) < tol().root_residual && (hi - lo) < 1e-12) break;
        if ((fmid > 0.0) == (flo > 0.0)) {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
        }
    }
    return {mid, std::abs(fmid), it};
}

} // namespace detail

/// Root of the thermal two-qubit optimum in p, reported as k_B T / E.
inline ThresholdResult threshold_two_qubit() {
    auto info = detail::bisect([](double p) { return detail::cmax_thermal_2q_raw(p); }, 0.5 + 1e-12,
                               1.0 - 1e-12);
    ThresholdResult r;
    r.family = ThresholdFamily::TwoQubit;
    r.n = 2;
    r.p_root = info.root;
    r.kT_over_E = detail::kT_from_p(info.root);
    r.residual = info.residual;
    r.iterations = info.iterations;
    return r;
}

/// Closed-form scaling laws quoted alongside the exact roots.
inline double closed_form_all_bip(std::size_t n) {
    return static_cast<double>(n) / (2.0 * std::log(1.0 + std::sqrt(2.0)));
}
inline double closed_form_single_bip(std::size_t n) {
    return (static_cast<double>(n) - 0.5) / std::log(3.0);
}
inline double closed_form_gme_ghz() { return 1.0 / (2.0 * std::log(2.0)); }
inline double closed_form_gme_dicke(std::size_t n, std::size_t k) {
    return static_cast<double>(n) / ((static_cast<double>(k) + 1.0) * std::log(static_cast<double>(n)));
}

/// Exact root of the all-bipartition concurrence in p.
inline ThresholdResult threshold_all_bip(std::size_t n) {
    if (n < 2) throw PreconditionError("threshold_all_bip: n >= 2");
    auto info = detail::bisect(
        [n](double p) {
            return detail::bipartition_concurrence_raw(p, n, BipartitionVariant::AllBipartitions);
        },
        0.5 + 1e-12, 1.0 - 1e-12);
    ThresholdResult r;
    r.family = ThresholdFamily::AllBipartitions;
    r.n = n;
    r.p_root = info.root;
    r.kT_over_E = detail::kT_from_p(info.root);
    r.residual = info.residual;
    r.iterations = info.iterations;
    return r;
}

/// Exact root of the single-bipartition concurrence in p.
inline ThresholdResult threshold_single_bip(std::size_t n) {
    if (n < 2) throw PreconditionError("threshold_single_bip: n >= 2");
    auto info = detail::bisect(
        [n](double p) {
            return detail::bipartition_concurrence_raw(p, n, BipartitionVariant::SingleBipartition);
        },
        0.5 + 1e-12, 1.0 - 1e-12);
    ThresholdResult r;
    r.family = ThresholdFamily::SingleBipartition;
    r.n = n;
    r.p_root = info.root;
    r.kT_over_E = detail::kT_from_p(info.root);
    r.residual = info.residual;
    r.iterations = info.iterations;
    return r;
}

namespace detail {
// GHZ-protocol GME condition p^n - (1-p)^n - 2 (2^{n-1} - 1) p^{n/2} (1-p)^{n/2}
inline double ghz_gme_expression(double p, std::size_t n) {
    const double nn = static_cast<double>(n);
    return std::pow(p, nn) - std::pow(1.0 - p, nn) -
           2.0 * (std::pow(2.0, nn - 1.0) - 1.0) * std::pow(p, nn / 2.0) *
               std::pow(1.0 - p, nn / 2.0);
}
} // namespace detail

/// Root of the GHZ-protocol GME condition, asymptotically 1/(2 ln 2).
inline ThresholdResult threshold_gme_ghz(std::size_t n) {
    if (n < 2) throw PreconditionError("threshold_gme_ghz: n >= 2");
    auto info = detail::bisect([n](double p) { return detail::ghz_gme_expression(p, n); },
                               0.5 + 1e-12, 1.0 - 1e-12);
    ThresholdResult r;
    r.family = ThresholdFamily::GmeGhz;
    r.n = n;
    r.p_root = info.root;
    r.kT_over_E = detail::kT_from_p(info.root);
    r.residual = info.residual;
    r.iterations = info.iterations;
    return r;
}

/// Numeric Dicke-protocol threshold: bisect the temperature at which the
/// witness of the protocol output changes sign. Structured evaluation keeps
/// this cheap up to n = 24.
inline ThresholdResult threshold_gme_dicke(std::size_t n, std::size_t k) {
    if (n < 3 || n > 24) throw PreconditionError("threshold_gme_dicke: n in [3, 24]");
    if (k < 1 || k > n - 1) throw BadExcitationError("threshold_gme_dicke: 1 <= k <= n-1");
    auto witness_at = [&](double kT) {
        return dicke_protocol_detail(ThermalSystem::qubits(n, kT), k).witness;
    };
    // bracket: positive near T = 0 (pure Dicke), negative at high T
    double lo = 1e-3, hi = 8.0 * closed_form_gme_dicke(n, k);
    if (witness_at(lo) <= 0.0) throw AboveThresholdError("threshold_gme_dicke: no positive region");
    while (witness_at(hi) > 0.0 && hi < 1e6) hi *= 2.0;
    auto info = detail::bisect(witness_at, lo, hi);
    ThresholdResult r;
    r.family = ThresholdFamily::GmeDicke;
    r.n = n;
    r.k = k;
    r.kT_over_E = info.root;
    r.residual = info.residual;
    r.iterations = info.iterations;
    const double kT = info.root;
    r.p_root = 1.0 / (1.0 + std::exp(-1.0 / kT));
    return r;
}

/// Spectrum-only absolute-separability criterion for a 2 x d cut:
/// true iff l1 - l_{2d-1} - 2 sqrt(l_{2d-2} l_{2d}) <= 0 (indices on the
/// non-increasing spectrum of length 2d).
inline bool separability_upper_bound(const SpectrumVector& spec) {
    const auto& l = spec.values;
    const std::size_t m = l.size();
    if (m < 4 || m % 2 != 0)
        throw PreconditionError("separability_upper_bound: need an even spectrum length >= 4");
    const double expr = l[0] - l[m - 2] - 2.0 * std::sqrt(std::max(0.0, l[m - 3] * l[m - 1]));
    return expr <= 0.0;
}

namespace detail {
// criterion expression on the thermal n-qubit spectrum, as a function of p
inline double separability_expression_thermal(double p, std::size_t n) {
    const double v = (1.0 - p) / p;
    const double pn = std::pow(p, static_cast<double>(n));
    // ordered extremes: l1 = p^n; smallest three: p^n v^n, p^n v^{n-1}, p^n v^{n-1}
    const double l_small = pn * std::pow(v, static_cast<double>(n));
    const double l_mid = pn * std::pow(v, static_cast<double>(n) - 1.0);
    return pn - l_mid - 2.0 * std::sqrt(l_mid * l_small);
}
} // namespace detail

/// Boundary temperature of the separability criterion on thermal n-qubit
/// spectra (coincides with the single-bipartition protocol root).
inline ThresholdResult separability_boundary_temperature(std::size_t n) {
    if (n < 2) throw PreconditionError("separability_boundary_temperature: n >= 2");
    auto info = detail::bisect(
        [n](double p) { return detail::separability_expression_thermal(p, n); }, 0.5 + 1e-12,
        1.0 - 1e-12);
    ThresholdResult r;
    r.family = ThresholdFamily::UpperQubitQudit;
    r.n = n;
    r.p_root = info.root;
    r.kT_over_E = detail::kT_from_p(info.root);
    r.residual = info.residual;
    r.iterations = info.iterations;
    return r;
}

/// Linear upper bounds (n-1)/ln 3 on the all-bipartition and GME thresholds.
inline std::pair<double, double> upper_bound_temperatures(std::size_t n) {
    if (n < 2) throw PreconditionError("upper_bound_temperatures: n >= 2");
    const double t = (static_cast<double>(n) - 1.0) / std::log(3.0);
    return {t, t};
}

} // namespace thermocorr
