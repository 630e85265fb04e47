#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "thermocorr/correlations.hpp"
#include "thermocorr/eigen.hpp"
#include "thermocorr/energycost.hpp"
#include "thermocorr/protocols.hpp"
#include "thermocorr/thermal.hpp"

namespace thermocorr {

/// Haar-ish random unitary: a product of random two-level rotations composed
/// with random diagonal phases. Adequate wherever only orbit coverage matters.
template <class Rng>
ComplexMatrix random_unitary(std::size_t dim, Rng& rng) {
    std::uniform_real_distribution<double> ang(-std::numbers::pi, std::numbers::pi);
    std::uniform_int_distribution<std::size_t> pick(0, dim - 1);
    ComplexMatrix u(dim, dim);
    for (std::size_t i = 0; i < dim; ++i) u(i, i) = std::polar(1.0, ang(rng));
    const std::size_t rounds = 2 * dim * dim;
    for (std::size_t r = 0; r < rounds; ++r) {
        std::size_t a = pick(rng), b = pick(rng);
        if (a == b) continue;
        u = u * two_level_rotation(dim, a, b, ang(rng), ang(rng));
    }
    return u;
}

struct SelfTestReport {
    std::size_t trials = 0;
    std::size_t violations = 0;
    std::size_t checks = 0;
    std::vector<std::string> failures;

    bool ok() const { return violations == 0; }
};

/// Randomized invariant suite: spectrum preservation on the unitary orbit,
/// work non-negativity, mutual-information bound domination, and entropy
/// unitary-invariance. Seed-fixed and deterministic.
inline SelfTestReport run_selftest(std::uint64_t seed = 42, std::size_t trials = 1000) {
    SelfTestReport rep;
    rep.trials = trials;
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> pick_n(2, 3), pick_d(2, 3);
    std::uniform_real_distribution<double> pick_kt(0.05, 5.0);
    std::uniform_real_distribution<double> u01(0.0, 1.0);

    auto note = [&](const std::string& what, std::size_t trial, double value) {
        ++rep.violations;
        if (rep.failures.size() < 32) {
            std::ostringstream os;
            os << what << " violated at trial " << trial << " (value " << value << ")";
            rep.failures.push_back(os.str());
        }
    };

    for (std::size_t t = 0; t < trials; ++t) {
        const std::size_t n = static_cast<std::size_t>(pick_n(rng));
        std::size_t d = static_cast<std::size_t>(pick_d(rng));
        if (n == 3 && d == 3) d = 2; // keep dims <= 27
        std::vector<double> levels(d);
        for (std::size_t k = 0; k < d; ++k) levels[k] = static_cast<double>(k);
        const double beta = (u01(rng) < 0.1) ? std::numeric_limits<double>::infinity()
                                             : 1.0 / pick_kt(rng);
        ThermalSystem sys(n, levels, beta);
        const auto ts = thermal_state(sys);
        const auto u = random_unitary(ts.rho.dim(), rng);
        DensityMatrix rho_f(u * ts.rho.mat * u.dagger(), ts.rho.dims);

        // 1. spectrum preservation
        auto spec_f = eigh(rho_f.mat).eigenvalues;
        std::vector<double> spec_i;
        for (std::size_t i = 0; i < ts.rho.dim(); ++i) spec_i.push_back(ts.rho.mat(i, i).real());
        std::sort(spec_i.begin(), spec_i.end());
        double worst = 0.0;
        for (std::size_t i = 0; i < spec_i.size(); ++i)
            worst = std::max(worst, std::abs(spec_i[i] - spec_f[i]));
        ++rep.checks;
        if (worst > tol().spectrum_match) note("spectrum preservation", t, worst);

        // 2. work non-negativity
        const double w = work_cost(rho_f, sys);
        ++rep.checks;
        if (w < tol().work_floor) note("work non-negativity", t, w);

        // 3. mutual information bounded by the temperature ceiling
        const double mi = mutual_information(rho_f).value;
        const double bound = mi_max_bound(sys);
        ++rep.checks;
        if (mi > bound + 1e-9) note("mutual-information bound", t, mi - bound);

        // 4. entropy unitary invariance
        const double ds = std::abs(entropy_vn(rho_f) - entropy_vn(ts.rho));
        ++rep.checks;
        if (ds > 1e-9) note("entropy unitary-invariance", t, ds);
    }
    return rep;
}

} // namespace thermocorr
