#pragma once

#include <cmath>
#include <vector>

#include "thermocorr/density.hpp"
#include "thermocorr/thermal.hpp"

namespace thermocorr {

struct MutualInfoReport {
    double value = 0.0;                 // nats
    std::vector<double> local_entropies; // nats, one per factor
    double total_entropy = 0.0;          // nats
};

/// Multipartite mutual information: sum of single-factor entropies minus the
/// total entropy. Works for any factor count n >= 2.
inline MutualInfoReport mutual_information(const DensityMatrix& rho) {
    if (rho.factors() < 2) throw SingleFactorError("mutual_information: need at least two factors");
    MutualInfoReport rep;
    for (std::size_t f = 0; f < rho.factors(); ++f) {
        const auto marg = partial_trace(rho, {f});
        rep.local_entropies.push_back(entropy_vn(marg));
    }
    rep.total_entropy = entropy_vn(rho);
    double v = -rep.total_entropy;
    for (double s : rep.local_entropies) v += s;
    if (v < 0.0 && v > tol().clamp_negative) v = 0.0; // floating-point guard
    rep.value = v;
    return rep;
}

/// Temperature-limited ceiling n (ln d - S(tau_beta)).
inline double mi_max_bound(const ThermalSystem& sys) {
    return static_cast<double>(sys.n) * (std::log(static_cast<double>(sys.d())) - local_entropy(sys));
}

/// Energy-limited ceiling n (S(tau_beta') - S(tau_beta)) with beta' matched
/// to the budget. The bipartite n = 2 case carries the factor 2.
inline double mi_energy_bound(const ThermalSystem& sys, double deltaE) {
    const double beta_prime = solve_beta_prime(sys, deltaE);
    ThermalSystem heated(1, sys.levels, beta_prime);
    double v = static_cast<double>(sys.n) * (local_entropy(heated) - local_entropy(sys));
    if (v < 0.0 && v > tol().clamp_negative) v = 0.0;
    return v;
}

} // namespace thermocorr
