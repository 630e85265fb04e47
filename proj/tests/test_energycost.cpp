#include <catch_amalgamated.hpp>

#include "test_helpers.hpp"
#include "thermocorr/energycost.hpp"
#include "thermocorr/thresholds.hpp"

using namespace thermocorr;

namespace {

OptimizerConfig fast_cfg() {
    OptimizerConfig cfg;
    cfg.restarts = 6;
    cfg.max_iters = 800;
    return cfg;
}

} // namespace

TEST_CASE("work_cost") {
    ThermalSystem sys(2, {0.0, 1.0}, 1.4);
    auto ts = thermal_state(sys);
    SECTION("unchanged state costs nothing") {
        CHECK(work_cost(ts.rho, sys) == Catch::Approx(0.0).margin(1e-14));
    }
    SECTION("Bell state from the ground state costs E") {
        ThermalSystem cold(2, {0.0, 1.0}, std::numeric_limits<double>::infinity());
        ComplexMatrix bell(4, 4);
        for (int i : {0, 3})
            for (int j : {0, 3}) bell(i, j) = 0.5;
        CHECK(work_cost(DensityMatrix(bell, {2, 2}), cold) == Catch::Approx(1.0));
    }
    SECTION("any unitary is free at infinite temperature") {
        std::mt19937_64 rng(8);
        ThermalSystem hot(2, {0.0, 1.0}, 0.0);
        auto tsh = thermal_state(hot);
        auto u = random_unitary(4, rng);
        DensityMatrix rot(u * tsh.rho.mat * u.dagger(), tsh.rho.dims);
        CHECK(work_cost(rot, hot) == Catch::Approx(0.0).margin(1e-12));
    }
}

TEST_CASE("protocol_work_closed_form") {
    SECTION("ghz at zero temperature gives nE/2") {
        ThermalSystem cold(6, {0.0, 1.0}, std::numeric_limits<double>::infinity());
        CHECK(protocol_work_closed_form(WorkProtocol::Ghz, 6, cold) == Catch::Approx(3.0));
    }
    SECTION("leave-separable at n = 2 is sqrt(2) - 1") {
        ThermalSystem sys(2, {0.0, 1.0}, 1.0);
        CHECK(protocol_work_closed_form(WorkProtocol::LeaveSeparable, 2, sys) ==
              Catch::Approx(std::sqrt(2.0) - 1.0).epsilon(1e-12));
    }
    SECTION("leave-separable decreases monotonically from n = 4") {
        ThermalSystem sys(2, {0.0, 1.0}, 1.0);
        double prev = protocol_work_closed_form(WorkProtocol::LeaveSeparable, 4, sys);
        for (std::size_t n = 5; n <= 20; ++n) {
            const double w = protocol_work_closed_form(WorkProtocol::LeaveSeparable, n, sys);
            CHECK(w < prev);
            prev = w;
        }
    }
    SECTION("full-mi equals the direct bell-protocol work") {
        for (double betaE : {0.4, 1.3}) {
            ThermalSystem sys(2, {0.0, 1.0}, betaE);
            auto out = apply_protocol(bell_basis_unitary(2, 2), sys);
            CHECK(protocol_work_closed_form(WorkProtocol::FullMi, 2, sys) ==
                  Catch::Approx(out.work).margin(1e-10));
        }
    }
    SECTION("unknown protocol string") {
        CHECK_THROWS_AS(work_protocol_from_string("nope"), BadProtocolError);
    }
}

TEST_CASE("wstate work comparison") {
    // the appendix closed form disagrees with the direct permutation
    // bookkeeping; the direct value is authoritative
    ThermalSystem sys(8, {0.0, 1.0}, 1.0);
    auto cmp = wstate_work_comparison(sys);
    CHECK(cmp.direct > 0.0);
    CHECK(cmp.discrepancy == Catch::Approx(std::abs(cmp.closed_form - cmp.direct)));
    SECTION("they coincide at zero temperature") {
        ThermalSystem cold(6, {0.0, 1.0}, std::numeric_limits<double>::infinity());
        auto c0 = wstate_work_comparison(cold);
        CHECK(c0.closed_form == Catch::Approx(1.0).margin(1e-12));
        CHECK(c0.direct == Catch::Approx(1.0).margin(1e-12));
    }
}

TEST_CASE("ansatz_two_angle") {
    SECTION("unlimited budget recovers the spectrum optimum") {
        for (double kT : {0.3, 0.6, 1.0}) {
            auto sys = ThermalSystem::qubits(2, kT);
            const double cmax = cmax_thermal_2q(sys.local_populations()[0]);
            const auto [c, angles] = ansatz_two_angle(sys, 10.0);
            CHECK(c == Catch::Approx(cmax).margin(1e-6));
        }
    }
    SECTION("no budget, finite temperature: nothing happens") {
        auto sys = ThermalSystem::qubits(2, 0.7);
        CHECK(ansatz_two_angle(sys, 0.0).first == Catch::Approx(0.0).margin(1e-9));
    }
    SECTION("low temperature reaches essentially a full Bell state") {
        auto sys = ThermalSystem::qubits(2, 0.1);
        const auto [c, angles] = ansatz_two_angle(sys, 10.0);
        CHECK(c >= 0.98);
    }
}

TEST_CASE("optimize_concurrence_constrained") {
    SECTION("zero-temperature curve") {
        ThermalSystem cold(2, {0.0, 1.0}, std::numeric_limits<double>::infinity());
        for (double x : {0.25, 0.8, 1.0}) {
            const auto [c, u] = optimize_concurrence_constrained(cold, x, fast_cfg());
            CHECK(c == Catch::Approx(std::sqrt(x * (2.0 - x))).margin(2e-3));
        }
        // past the Bell point extra budget cannot help or hurt
        const auto [c, u] = optimize_concurrence_constrained(cold, 1.6, fast_cfg());
        CHECK(c == Catch::Approx(1.0).margin(2e-3));
    }
    SECTION("unlimited budget matches the closed form") {
        auto sys = ThermalSystem::qubits(2, 0.5);
        const auto [c, u] = optimize_concurrence_constrained(sys, 10.0, fast_cfg());
        CHECK(c == Catch::Approx(cmax_thermal_2q(sys.local_populations()[0])).margin(1e-3));
    }
    SECTION("above the threshold nothing is reachable") {
        auto sys = ThermalSystem::qubits(2, 1.3);
        const auto [c, u] = optimize_concurrence_constrained(sys, 5.0, fast_cfg());
        CHECK(c <= 1e-9);
    }
    SECTION("the returned unitary respects the budget") {
        auto sys = ThermalSystem::qubits(2, 0.4);
        const double budget = 0.3;
        const auto [c, u] = optimize_concurrence_constrained(sys, budget, fast_cfg());
        auto out = apply_protocol(u, sys);
        CHECK(out.work <= budget + 1e-9);
        CHECK(out.measures.at("concurrence") == Catch::Approx(c).margin(1e-9));
    }
    SECTION("monotone in the budget up to stochastic slack") {
        auto sys = ThermalSystem::qubits(2, 0.5);
        const double c1 = optimize_concurrence_constrained(sys, 0.2, fast_cfg()).first;
        const double c2 = optimize_concurrence_constrained(sys, 0.5, fast_cfg()).first;
        CHECK(c1 <= c2 + 2e-3);
    }
    SECTION("deterministic for a fixed seed") {
        auto sys = ThermalSystem::qubits(2, 0.6);
        const double a = optimize_concurrence_constrained(sys, 0.4, fast_cfg()).first;
        const double b = optimize_concurrence_constrained(sys, 0.4, fast_cfg()).first;
        CHECK(a == b);
    }
}

TEST_CASE("min_energy_to_entangle") {
    SECTION("zero temperature needs almost nothing") {
        ThermalSystem cold(2, {0.0, 1.0}, std::numeric_limits<double>::infinity());
        CHECK(min_energy_to_entangle(cold, fast_cfg()) <= 1e-3);
    }
    SECTION("finite temperature needs a strictly positive budget") {
        auto sys = ThermalSystem::qubits(2, 0.8);
        CHECK(min_energy_to_entangle(sys, fast_cfg()) > 1e-4);
    }
    SECTION("above threshold state") {
        auto sys = ThermalSystem::qubits(2, 1.3);
        CHECK_THROWS_AS(min_energy_to_entangle(sys, fast_cfg()), AboveThresholdError);
    }
}

TEST_CASE("sweep_curve") {
    SECTION("mutual-information sweep") {
        auto curves = sweep_curve(SweepKind::MiVsEnergy, 0.5, 24);
        REQUIRE(curves.size() == 1);
        const auto& c = curves.front();
        REQUIRE(c.x.size() == 24);
        auto sys = ThermalSystem::qubits(2, 0.5);
        CHECK(c.y.back() == Catch::Approx(mi_max_bound(sys)).margin(1e-9));
        for (std::size_t i = 1; i < c.x.size(); ++i) {
            CHECK(c.x[i] > c.x[i - 1]);
            CHECK(c.y[i] >= c.y[i - 1] - 1e-12);
        }
        // concavity of the bound in the energy budget
        for (std::size_t i = 1; i + 1 < c.y.size(); ++i)
            CHECK(c.y[i + 1] - c.y[i] <= c.y[i] - c.y[i - 1] + 1e-9);
    }
    SECTION("concurrence sweep emits optimizer and ansatz series") {
        OptimizerConfig cfg = fast_cfg();
        cfg.restarts = 2;
        cfg.max_iters = 300;
        auto curves = sweep_curve(SweepKind::ConcurrenceVsEnergy, 0.3, 6, cfg);
        REQUIRE(curves.size() == 2);
        CHECK(curves[0].meta.method == "optimizer");
        CHECK(curves[1].meta.method == "ansatz");
        for (std::size_t i = 0; i < curves[0].x.size(); ++i)
            CHECK(curves[1].y[i] <= curves[0].y[i] + 1e-9);
        CHECK(curves[0].y.back() == Catch::Approx(curves[1].y.back()).margin(1e-6));
    }
}
