#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "thermocorr/constants.hpp"
#include "thermocorr/density.hpp"
#include "thermocorr/errors.hpp"

namespace thermocorr {

/// n identical subsystems with local level energies `levels` (ascending,
/// levels[0] = 0, units of E) at inverse temperature beta (k_B = 1).
/// beta = +infinity is an explicit sentinel meaning the local ground state.
struct ThermalSystem {
    std::size_t n = 2;
    std::vector<double> levels{0.0, 1.0};
    double beta = 1.0;

    ThermalSystem() = default;
    ThermalSystem(std::size_t n_, std::vector<double> levels_, double beta_)
        : n(n_), levels(std::move(levels_)), beta(beta_) {
        if (n < 1) throw PreconditionError("ThermalSystem: need n >= 1");
        if (levels.size() < 2) throw PreconditionError("ThermalSystem: need at least two levels");
        if (levels.front() != 0.0) throw PreconditionError("ThermalSystem: levels[0] must be 0");
        for (std::size_t i = 1; i < levels.size(); ++i)
            if (levels[i] < levels[i - 1]) throw PreconditionError("ThermalSystem: levels must ascend");
        if (!(beta >= 0.0)) throw PreconditionError("ThermalSystem: beta must be >= 0");
    }

    /// Two qubits with excited-state energy E at dimensionless temperature kT/E.
    static ThermalSystem qubits(std::size_t n, double kT_over_E, double E = 1.0) {
        const double beta = kT_over_E <= 0.0 ? std::numeric_limits<double>::infinity()
                                             : 1.0 / (kT_over_E * E);
        return ThermalSystem(n, {0.0, E}, beta);
    }

    std::size_t d() const { return levels.size(); }
    bool ground_sentinel() const { return std::isinf(beta); }

    double partition_function() const {
        if (ground_sentinel()) return 1.0;
        double z = 0.0;
        for (double e : levels) z += std::exp(-beta * e);
        return z;
    }

    std::vector<double> local_populations() const {
        std::vector<double> p(d(), 0.0);
        if (ground_sentinel()) {
            p[0] = 1.0;
            return p;
        }
        const double z = partition_function();
        for (std::size_t k = 0; k < d(); ++k) p[k] = std::exp(-beta * levels[k]) / z;
        return p;
    }

    double local_mean_energy() const {
        const auto p = local_populations();
        double e = 0.0;
        for (std::size_t k = 0; k < d(); ++k) e += p[k] * levels[k];
        return e;
    }

    /// Energy of the n-party product basis state with the given row-major index.
    double total_energy_of_index(std::size_t idx) const {
        double e = 0.0;
        const std::size_t dd = d();
        for (std::size_t f = 0; f < n; ++f) {
            e += levels[idx % dd];
            idx /= dd;
        }
        return e;
    }

    std::size_t total_dim() const {
        std::size_t dd = 1;
        for (std::size_t f = 0; f < n; ++f) dd *= d();
        return dd;
    }
};

/// -sum p ln p over a probability vector, with 0 ln 0 := 0.
inline double entropy_of_spectrum(const std::vector<double>& p) {
    double s = 0.0;
    for (double x : p)
        if (x > 0.0) s -= x * std::log(x);
    return s;
}

inline double local_entropy(const ThermalSystem& sys) {
    return entropy_of_spectrum(sys.local_populations());
}

struct ThermalStateResult {
    DensityMatrix rho;
    double Z;
    double p;
};

/// tau_beta^{\otimes n} as a dense diagonal state, with the local partition
/// function and ground population.
inline ThermalStateResult thermal_state(const ThermalSystem& sys) {
    const std::size_t dim = sys.total_dim();
    if (dim > kMaxDenseDim) throw DimensionMismatchError("thermal_state: dimension exceeds dense cap");
    const auto p = sys.local_populations();
    ComplexMatrix m(dim, dim);
    for (std::size_t idx = 0; idx < dim; ++idx) {
        double val = 1.0;
        std::size_t rest = idx;
        for (std::size_t f = 0; f < sys.n; ++f) {
            val *= p[rest % sys.d()];
            rest /= sys.d();
        }
        m(idx, idx) = val;
    }
    return {DensityMatrix(std::move(m), std::vector<std::size_t>(sys.n, sys.d())),
            sys.partition_function(), p[0]};
}

/// Von Neumann entropy in nats.
inline double entropy_vn(const DensityMatrix& rho) {
    auto eg = eigh(rho.mat);
    double s = 0.0;
    for (double lam : eg.eigenvalues)
        if (lam > 0.0) s -= lam * std::log(lam);
    return s;
}

/// Tr(H_tot rho) with H_tot the sum of the local Hamiltonians, units of E.
inline double mean_energy(const DensityMatrix& rho, const ThermalSystem& sys) {
    if (rho.dim() != sys.total_dim())
        throw DimensionMismatchError("mean_energy: state dimension does not match system");
    double e = 0.0;
    for (std::size_t i = 0; i < rho.dim(); ++i)
        e += sys.total_energy_of_index(i) * rho.mat(i, i).real();
    return e;
}

/// Largest admissible energy budget: the gap from tau_beta^{\otimes n} up to
/// the infinite-temperature state.
inline double max_energy_budget(const ThermalSystem& sys) {
    double mean_level = 0.0;
    for (double e : sys.levels) mean_level += e;
    mean_level /= static_cast<double>(sys.d());
    return static_cast<double>(sys.n) * (mean_level - sys.local_mean_energy());
}

/// beta' in [0, beta] such that heating every marginal from tau_beta to
/// tau_beta' costs exactly deltaE. Bisection on the monotone map
/// beta' -> total mean energy.
inline double solve_beta_prime(const ThermalSystem& sys, double deltaE) {
    if (deltaE < 0.0) throw PreconditionError("solve_beta_prime: deltaE must be >= 0");
    const double de_max = max_energy_budget(sys);
    if (deltaE > de_max + 1e-12)
        throw BudgetExceedsMaxError("solve_beta_prime: deltaE exceeds the gap to beta' = 0");
    if (deltaE == 0.0) return sys.beta;
    if (deltaE >= de_max) return 0.0;

    const double nn = static_cast<double>(sys.n);
    auto energy_at = [&](double bp) {
        ThermalSystem s2(1, sys.levels, bp);
        return nn * s2.local_mean_energy();
    };
    const double target = nn * sys.local_mean_energy() + deltaE;

    double lo = 0.0; // highest temperature end: max energy
    double hi = sys.beta;
    if (std::isinf(hi)) {
        hi = 1.0;
        while (energy_at(hi) > target && hi < 1e9) hi *= 2.0;
    }
    double mid = 0.5 * (lo + hi);
    for (int it = 0; it < tol().bisection_max_iters; ++it) {
        mid = 0.5 * (lo + hi);
        const double e = energy_at(mid);
        if (std::abs(e - target) < tol().bisection_residual) return mid;
        if (e > target)
            lo = mid; // too hot, raise beta'
        else
            hi = mid;
    }
    return mid;
}

} // namespace thermocorr
