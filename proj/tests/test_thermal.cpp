#include <catch_amalgamated.hpp>

#include <random>

#include "test_helpers.hpp"
#include "thermocorr/thermal.hpp"

using namespace thermocorr;

TEST_CASE("thermal_state examples") {
    SECTION("qubit at beta = infinity") {
        auto ts = thermal_state(ThermalSystem(1, {0.0, 1.0}, std::numeric_limits<double>::infinity()));
        CHECK(ts.rho.mat(0, 0).real() == 1.0);
        CHECK(ts.rho.mat(1, 1).real() == 0.0);
        CHECK(ts.Z == 1.0);
        CHECK(ts.p == 1.0);
    }
    SECTION("qubit at beta = 0") {
        auto ts = thermal_state(ThermalSystem(1, {0.0, 1.0}, 0.0));
        CHECK(ts.rho.mat(0, 0).real() == Catch::Approx(0.5));
        CHECK(ts.Z == Catch::Approx(2.0));
        CHECK(ts.p == Catch::Approx(0.5));
    }
    SECTION("qubit at beta E = ln 2") {
        auto ts = thermal_state(ThermalSystem(1, {0.0, 1.0}, std::log(2.0)));
        CHECK(ts.p == Catch::Approx(2.0 / 3.0).epsilon(1e-12));
    }
}

TEST_CASE("entropy examples") {
    SECTION("pure state") {
        ComplexMatrix m(2, 2);
        m(0, 0) = 1.0;
        CHECK(entropy_vn(DensityMatrix(m, {2})) == Catch::Approx(0.0).margin(1e-14));
    }
    SECTION("maximally mixed qubit") {
        ComplexMatrix m(2, 2);
        m(0, 0) = 0.5;
        m(1, 1) = 0.5;
        CHECK(entropy_vn(DensityMatrix(m, {2})) == Catch::Approx(std::log(2.0)).epsilon(1e-12));
    }
    SECTION("diag(2/3, 1/3)") {
        ComplexMatrix m(2, 2);
        m(0, 0) = 2.0 / 3.0;
        m(1, 1) = 1.0 / 3.0;
        const double expect = std::log(3.0) - (2.0 / 3.0) * std::log(2.0); // 0.636514...
        CHECK(entropy_vn(DensityMatrix(m, {2})) == Catch::Approx(expect).epsilon(1e-12));
        CHECK(expect == Catch::Approx(0.636514168294813).epsilon(1e-12));
    }
}

TEST_CASE("mean_energy examples") {
    SECTION("ground state") {
        ThermalSystem sys(2, {0.0, 1.0}, std::numeric_limits<double>::infinity());
        auto ts = thermal_state(sys);
        CHECK(mean_energy(ts.rho, sys) == Catch::Approx(0.0).margin(1e-15));
    }
    SECTION("Bell state of two qubits") {
        ThermalSystem sys(2, {0.0, 1.0}, 1.0);
        ComplexMatrix bell(4, 4);
        for (int i : {0, 3})
            for (int j : {0, 3}) bell(i, j) = 0.5;
        CHECK(mean_energy(DensityMatrix(bell, {2, 2}), sys) == Catch::Approx(1.0));
    }
    SECTION("thermal qubit at beta E = ln 2") {
        ThermalSystem sys(1, {0.0, 1.0}, std::log(2.0));
        auto ts = thermal_state(sys);
        CHECK(mean_energy(ts.rho, sys) == Catch::Approx(1.0 / 3.0).epsilon(1e-12));
    }
    SECTION("dimension mismatch") {
        ThermalSystem sys(2, {0.0, 1.0}, 1.0);
        ComplexMatrix m(2, 2);
        m(0, 0) = 1.0;
        CHECK_THROWS_AS(mean_energy(DensityMatrix(m, {2}), sys), DimensionMismatchError);
    }
}

TEST_CASE("solve_beta_prime") {
    SECTION("zero budget returns beta") {
        ThermalSystem sys(2, {0.0, 1.0}, 1.7);
        CHECK(solve_beta_prime(sys, 0.0) == 1.7);
    }
    SECTION("full budget returns zero") {
        ThermalSystem sys(2, {0.0, 1.0}, 1.7);
        CHECK(solve_beta_prime(sys, max_energy_budget(sys)) == 0.0);
    }
    SECTION("ground state heated to beta' E = ln 2") {
        ThermalSystem sys(2, {0.0, 1.0}, std::numeric_limits<double>::infinity());
        const double bp = solve_beta_prime(sys, 2.0 / 3.0);
        CHECK(bp == Catch::Approx(std::log(2.0)).epsilon(1e-8));
    }
    SECTION("budget beyond the maximum") {
        ThermalSystem sys(2, {0.0, 1.0}, 1.0);
        CHECK_THROWS_AS(solve_beta_prime(sys, max_energy_budget(sys) + 1e-6),
                        BudgetExceedsMaxError);
    }
    SECTION("energy matching residual") {
        ThermalSystem sys(2, {0.0, 1.0, 2.5}, 2.0);
        for (double frac : {0.1, 0.4, 0.9}) {
            const double de = frac * max_energy_budget(sys);
            const double bp = solve_beta_prime(sys, de);
            ThermalSystem heated(2, sys.levels, bp);
            const double resid = std::abs(2.0 * heated.local_mean_energy() -
                                          2.0 * sys.local_mean_energy() - de);
            CHECK(resid < 1e-10);
        }
    }
}

TEST_CASE("thermal invariants") {
    SECTION("qubit entropy matches the analytic form") {
        for (double betaE : {0.1, 0.5, 1.0, 2.0, 5.0}) {
            ThermalSystem sys(1, {0.0, 1.0}, betaE);
            auto ts = thermal_state(sys);
            const double p = ts.p;
            const double analytic = betaE * (1.0 - p) + std::log(ts.Z);
            CHECK(entropy_vn(ts.rho) == Catch::Approx(analytic).margin(1e-10));
        }
    }
    SECTION("mean energy strictly decreasing in beta") {
        ThermalSystem base(2, {0.0, 1.0, 2.0}, 0.0);
        double prev = std::numeric_limits<double>::infinity();
        for (double b : {0.0, 0.3, 0.8, 1.5, 3.0, 8.0}) {
            ThermalSystem sys(2, base.levels, b);
            const double e = sys.local_mean_energy();
            CHECK(e < prev + 1e-15);
            if (b > 0.0) CHECK(e < prev);
            prev = e;
        }
    }
    SECTION("entropy is unitarily invariant") {
        std::mt19937_64 rng(11);
        ThermalSystem sys(2, {0.0, 1.0}, 0.9);
        auto ts = thermal_state(sys);
        for (int trial = 0; trial < 10; ++trial) {
            auto u = random_unitary(4, rng);
            DensityMatrix rot(u * ts.rho.mat * u.dagger(), ts.rho.dims);
            CHECK(std::abs(entropy_vn(rot) - entropy_vn(ts.rho)) <= 1e-9);
        }
    }
    SECTION("state validity") {
        auto ts = thermal_state(ThermalSystem(2, {0.0, 1.0}, 1.3));
        CHECK(validate_density(ts.rho));
    }
}
