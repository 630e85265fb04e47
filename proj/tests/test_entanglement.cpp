#include <catch_amalgamated.hpp>

#include <random>

#include "test_helpers.hpp"
#include "thermocorr/entanglement.hpp"
#include "thermocorr/thresholds.hpp"

using namespace thermocorr;

namespace {

DensityMatrix bell_state() {
    ComplexMatrix m(4, 4);
    for (int i : {0, 3})
        for (int j : {0, 3}) m(i, j) = 0.5;
    return DensityMatrix(m, {2, 2});
}

DensityMatrix werner(double w) {
    ComplexMatrix m(4, 4);
    for (int i : {0, 3})
        for (int j : {0, 3}) m(i, j) = 0.5 * w;
    for (int i = 0; i < 4; ++i) m(i, i) += (1.0 - w) / 4.0;
    return DensityMatrix(m, {2, 2});
}

// concurrence of a normalized pure state vector
double pure_concurrence(const std::vector<cplx>& psi) {
    // C = 2 |psi0 psi3 - psi1 psi2|
    return 2.0 * std::abs(psi[0] * psi[3] - psi[1] * psi[2]);
}

} // namespace

TEST_CASE("concurrence_2q examples") {
    CHECK(concurrence_2q(bell_state()) == Catch::Approx(1.0).margin(1e-10));
    SECTION("product states carry no concurrence") {
        std::mt19937_64 rng(9);
        for (int t = 0; t < 5; ++t) {
            auto a = testutil::random_density(2, rng);
            auto b = testutil::random_density(2, rng);
            DensityMatrix rho(kron_n({a.mat, b.mat}), {2, 2});
            CHECK(concurrence_2q(rho) <= 1e-8);
        }
    }
    SECTION("Werner state at w = 0.8") {
        CHECK(concurrence_2q(werner(0.8)) == Catch::Approx(0.7).margin(1e-10));
        // closed form max(0, (3w-1)/2) on a small grid
        for (double w : {0.2, 0.4, 0.6, 0.9}) {
            CHECK(concurrence_2q(werner(w)) ==
                  Catch::Approx(std::max(0.0, (3.0 * w - 1.0) / 2.0)).margin(1e-10));
        }
    }
    SECTION("wrong dimension") {
        ComplexMatrix m(2, 2);
        m(0, 0) = 1.0;
        CHECK_THROWS_AS(concurrence_2q(DensityMatrix(m, {2})), DimensionMismatchError);
    }
}

TEST_CASE("concurrence against the convex-roof brute force") {
    // every random pure-state decomposition upper-bounds the convex roof
    std::mt19937_64 rng(21);
    for (int state = 0; state < 20; ++state) {
        auto rho = testutil::random_density(4, rng, {2, 2});
        const double c = concurrence_2q(rho);
        auto eg = eigh(rho.mat);
        double best_dec = std::numeric_limits<double>::infinity();
        for (int dec = 0; dec < 40; ++dec) {
            auto u = random_unitary(4, rng);
            // |phi_i> = sum_j u(i,j) sqrt(l_j) |e_j>
            double avg = 0.0;
            for (int i = 0; i < 4; ++i) {
                std::vector<cplx> phi(4, 0.0);
                double norm2 = 0.0;
                for (int j = 0; j < 4; ++j) {
                    const double lj = std::max(0.0, eg.eigenvalues[j]);
                    cplx coeff = u(i, j) * std::sqrt(lj);
                    for (int r = 0; r < 4; ++r) phi[r] += coeff * eg.eigenvectors(r, j);
                }
                for (const auto& x : phi) norm2 += std::norm(x);
                if (norm2 < 1e-15) continue;
                std::vector<cplx> unit(4);
                for (int r = 0; r < 4; ++r) unit[r] = phi[r] / std::sqrt(norm2);
                avg += norm2 * pure_concurrence(unit);
            }
            best_dec = std::min(best_dec, avg);
            REQUIRE(c <= avg + 1e-9);
        }
        // the sampled infimum should not sit far above the closed form
        CHECK(best_dec <= c + 0.5);
    }
}

TEST_CASE("cmax_from_spectrum") {
    CHECK(cmax_from_spectrum(SpectrumVector({1.0, 0.0, 0.0, 0.0})) == Catch::Approx(1.0));
    CHECK(cmax_from_spectrum(SpectrumVector({0.25, 0.25, 0.25, 0.25})) ==
          Catch::Approx(0.0).margin(1e-15));
    SECTION("thermal spectrum at p = 0.75") {
        CHECK(cmax_from_spectrum(SpectrumVector({0.5625, 0.1875, 0.1875, 0.0625})) ==
              Catch::Approx(0.158493649053890).epsilon(1e-10));
    }
    SECTION("input order is canonicalized") {
        std::mt19937_64 rng(2);
        std::vector<double> base{0.4, 0.3, 0.2, 0.1};
        const double ref = cmax_from_spectrum(SpectrumVector(base));
        for (int t = 0; t < 10; ++t) {
            std::shuffle(base.begin(), base.end(), rng);
            CHECK(cmax_from_spectrum(SpectrumVector(base)) == Catch::Approx(ref));
        }
    }
}

TEST_CASE("cmax_thermal_2q") {
    CHECK(cmax_thermal_2q(1.0) == Catch::Approx(1.0));
    CHECK(cmax_thermal_2q(0.698) <= 1e-3);
    CHECK(cmax_thermal_2q(0.75) == Catch::Approx(0.158493649053890).epsilon(1e-10));
    SECTION("agrees with the spectrum form on thermal spectra") {
        for (double p : {0.7, 0.8, 0.9, 0.99}) {
            const double q = 1 - p;
            CHECK(cmax_thermal_2q(p) ==
                  Catch::Approx(cmax_from_spectrum(SpectrumVector({p * p, p * q, p * q, q * q})))
                      .margin(1e-12));
        }
    }
}

TEST_CASE("cmax_from_spectrum dominates the unitary orbit") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> up(0.5, 0.99);
    for (int s = 0; s < 10; ++s) {
        const double p = up(rng), q = 1 - p;
        ComplexMatrix rho0(4, 4);
        rho0(0, 0) = p * p;
        rho0(1, 1) = p * q;
        rho0(2, 2) = p * q;
        rho0(3, 3) = q * q;
        const double cm = cmax_from_spectrum(SpectrumVector({p * p, p * q, p * q, q * q}));
        for (int t = 0; t < 60; ++t) {
            auto u = random_unitary(4, rng);
            DensityMatrix rot(u * rho0 * u.dagger(), {2, 2});
            CHECK(cm >= concurrence_2q(rot) - 1e-6);
        }
    }
}

TEST_CASE("bipartition_concurrence") {
    CHECK(bipartition_concurrence(1.0, 2, BipartitionVariant::AllBipartitions) ==
          Catch::Approx(1.0));
    CHECK(bipartition_concurrence(1.0, 5, BipartitionVariant::SingleBipartition) ==
          Catch::Approx(1.0));
    CHECK(bipartition_concurrence(0.75, 2, BipartitionVariant::AllBipartitions) ==
          Catch::Approx(0.125).margin(1e-14));
    SECTION("single-bipartition root sits at smaller p") {
        const double root_all = threshold_all_bip(6).p_root;
        const double root_single = threshold_single_bip(6).p_root;
        CHECK(root_single < root_all);
    }
}

TEST_CASE("xstate_gme_concurrence") {
    SECTION("pure GHZ") {
        std::vector<double> a{0.5, 0, 0, 0}, b{0.5, 0, 0, 0};
        std::vector<cplx> z{0.5, 0, 0, 0};
        CHECK(xstate_gme_concurrence(XStateParams(a, b, z)) == Catch::Approx(1.0));
    }
    SECTION("diagonal states carry nothing") {
        std::vector<double> a{0.3, 0.1, 0.05, 0.05}, b{0.2, 0.1, 0.1, 0.1};
        std::vector<cplx> z(4, 0.0);
        CHECK(xstate_gme_concurrence(XStateParams(a, b, z)) == 0.0);
    }
    SECTION("thermal GHZ-protocol form changes sign with the GME condition") {
        const std::size_t n = 6;
        auto protocol_value = [&](double p) {
            const double q = 1 - p;
            const double z1 = (std::pow(p, (double)n) - std::pow(q, (double)n)) / 2.0;
            const double w1 = (std::pow(2.0, (double)n - 1) - 1.0) *
                              std::pow(p, n / 2.0) * std::pow(q, n / 2.0);
            return z1 - w1;
        };
        auto eq27 = [&](double p) { return detail::ghz_gme_expression(p, n); };
        // bisect both expressions; roots must coincide
        auto root_of = [](auto f) {
            double lo = 0.5 + 1e-9, hi = 1.0 - 1e-9;
            for (int i = 0; i < 200; ++i) {
                const double mid = 0.5 * (lo + hi);
                if (f(mid) < 0.0)
                    lo = mid;
                else
                    hi = mid;
            }
            return 0.5 * (lo + hi);
        };
        CHECK(std::abs(root_of(protocol_value) - root_of(eq27)) < 1e-9);
    }
    SECTION("invalid parameters rejected") {
        std::vector<double> a{0.5, 0.0}, b{0.5, 0.0};
        std::vector<cplx> z{0.7, 0.0}; // exceeds sqrt(a b)
        CHECK_THROWS_AS(XStateParams(a, b, z), InvalidXStateError);
    }
}

namespace {

DensityMatrix pure_w3() {
    // (|001> + |010> + |100>)/sqrt(3)
    ComplexMatrix m(8, 8);
    for (int i : {1, 2, 4})
        for (int j : {1, 2, 4}) m(i, j) = 1.0 / 3.0;
    return DensityMatrix(m, {2, 2, 2});
}

DensityMatrix pure_dicke42() {
    ComplexMatrix m(16, 16);
    const std::vector<int> idx{3, 5, 6, 9, 10, 12};
    for (int i : idx)
        for (int j : idx) m(i, j) = 1.0 / 6.0;
    return DensityMatrix(m, {2, 2, 2, 2});
}

} // namespace

TEST_CASE("w_witness") {
    SECTION("pure W3 scores exactly one") {
        CHECK(w_witness(pure_w3(), 3) == Catch::Approx(1.0).margin(1e-12));
    }
    SECTION("ground state scores zero") {
        ComplexMatrix m(8, 8);
        m(0, 0) = 1.0;
        CHECK(w_witness(DensityMatrix(m, {2, 2, 2}), 3) == 0.0);
    }
    SECTION("diagonal thermal states are never flagged") {
        auto ts = thermal_state(ThermalSystem(3, {0.0, 1.0}, 0.8));
        CHECK(w_witness(ts.rho, 3) <= 0.0);
    }
}

TEST_CASE("dicke_witness") {
    SECTION("m = 1 reduces to w_witness on random states") {
        std::mt19937_64 rng(17);
        for (int t = 0; t < 8; ++t) {
            auto rho = testutil::random_density(8, rng, {2, 2, 2});
            CHECK(dicke_witness(rho, 3, 1) == Catch::Approx(w_witness(rho, 3)).margin(1e-10));
        }
    }
    SECTION("pure Dicke |D^4_2> is detected") {
        CHECK(dicke_witness(pure_dicke42(), 4, 2) > 0.0);
        CHECK(dicke_witness(pure_dicke42(), 4, 2) == Catch::Approx(2.0).margin(1e-10));
    }
    SECTION("diagonal thermal states score nonpositive") {
        auto ts = thermal_state(ThermalSystem(4, {0.0, 1.0}, 0.8));
        CHECK(dicke_witness(ts.rho, 4, 2) <= 0.0);
    }
    SECTION("bad excitation count") {
        CHECK_THROWS_AS(dicke_witness(pure_w3(), 3, 0), BadExcitationError);
        CHECK_THROWS_AS(dicke_witness(pure_w3(), 3, 3), BadExcitationError);
    }
}

TEST_CASE("optimal form matrix") {
    auto w = make_optimal_form(0.8, 0.9, 5);
    CHECK(w.offdiag(0, 0).real() == Catch::Approx(0.8 / 5.0));
    auto eg = eigh(w.offdiag);
    CHECK(eg.eigenvalues.front() >= -1e-12); // PSD whenever lam <= 1
    CHECK(w.offdiag.trace().real() == Catch::Approx(0.8).margin(1e-12));
}
