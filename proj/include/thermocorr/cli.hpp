#pragma once

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include <json.hpp>

#include "thermocorr/energycost.hpp"
#include "thermocorr/selftest.hpp"
#include "thermocorr/thresholds.hpp"

namespace thermocorr::cli {

inline constexpr const char* kVersion = "0.1.0";

enum class Command { Threshold, Protocol, Sweep, Optimize, SelfTest };
enum class OutputFormat { Json, Csv };

/// Parsed invocation: one command, its named parameters, and the output sink.
struct RunConfig {
    Command command = Command::Threshold;
    std::map<std::string, std::string> params;
    std::string output_path; // empty = stdout
    OutputFormat format = OutputFormat::Json;
};

namespace detail {

inline std::string sig12(double x) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.12g", x);
    return buf;
}

inline double require_number(const RunConfig& cfg, const std::string& key) {
    auto it = cfg.params.find(key);
    if (it == cfg.params.end())
        throw PreconditionError("missing required parameter --" + key);
    return std::stod(it->second);
}

inline double number_or(const RunConfig& cfg, const std::string& key, double fallback) {
    auto it = cfg.params.find(key);
    return it == cfg.params.end() ? fallback : std::stod(it->second);
}

inline std::string require_string(const RunConfig& cfg, const std::string& key) {
    auto it = cfg.params.find(key);
    if (it == cfg.params.end())
        throw PreconditionError("missing required parameter --" + key);
    return it->second;
}

inline void emit(const RunConfig& cfg, const std::string& text) {
    if (cfg.output_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(cfg.output_path, std::ios::binary);
    if (!out) throw Error("cannot open output file " + cfg.output_path);
    out << text;
}

inline nlohmann::json threshold_json(const ThresholdResult& r) {
    nlohmann::json j;
    j["family"] = to_string(r.family);
    j["n"] = r.n;
    if (r.k) j["k"] = *r.k;
    j["kT_over_E"] = r.kT_over_E;
    j["p_root"] = r.p_root;
    return j;
}

inline OptimizerConfig optimizer_config(const RunConfig& cfg) {
    OptimizerConfig oc;
    oc.restarts = static_cast<std::size_t>(number_or(cfg, "restarts", 32));
    oc.seed = static_cast<std::uint64_t>(number_or(cfg, "seed", 42));
    if (const char* threads = std::getenv("THERMOCORR_THREADS"))
        oc.threads = std::max<std::size_t>(1, static_cast<std::size_t>(std::atoi(threads)));
    return oc;
}

inline nlohmann::json run_threshold(const RunConfig& cfg) {
    const std::string family = require_string(cfg, "family");
    const std::size_t n = static_cast<std::size_t>(number_or(cfg, "n", 2));
    nlohmann::json inputs{{"family", family}, {"n", n}};
    nlohmann::json results, diagnostics;
    ThresholdResult r;
    if (family == "two-qubit") {
        r = threshold_two_qubit();
    } else if (family == "all-bip") {
        r = threshold_all_bip(n);
        results["closed_form"] = closed_form_all_bip(n);
    } else if (family == "single-bip") {
        r = threshold_single_bip(n);
        results["closed_form"] = closed_form_single_bip(n);
    } else if (family == "gme-ghz") {
        r = threshold_gme_ghz(n);
        results["asymptote"] = closed_form_gme_ghz();
    } else if (family == "gme-dicke") {
        const std::size_t k = static_cast<std::size_t>(number_or(cfg, "k", 1));
        inputs["k"] = k;
        r = threshold_gme_dicke(n, k);
        results["closed_form"] = closed_form_gme_dicke(n, k);
    } else if (family == "upper-qubit-qudit") {
        r = separability_boundary_temperature(n);
        results["upper_bound"] = upper_bound_temperatures(n).first;
    } else {
        throw PreconditionError("unknown threshold family: " + family);
    }
    for (auto& [k, v] : threshold_json(r).items()) results[k] = v;
    diagnostics["residual"] = r.residual;
    diagnostics["iterations"] = r.iterations;
    return nlohmann::json{{"inputs", inputs}, {"results", results},
                          {"diagnostics", diagnostics}, {"version", kVersion}};
}

inline nlohmann::json run_protocol(const RunConfig& cfg) {
    const std::string name = require_string(cfg, "name");
    const double kT = require_number(cfg, "kT");
    const std::size_t n = static_cast<std::size_t>(number_or(cfg, "n", 2));
    nlohmann::json inputs{{"name", name}, {"n", n}, {"kT_over_E", kT}};
    nlohmann::json results, diagnostics;

    ProtocolOutcome outcome;
    if (name == "bell") {
        const std::size_t d = static_cast<std::size_t>(number_or(cfg, "d", 2));
        inputs["d"] = d;
        ThermalSystem sys = ThermalSystem::qubits(n, kT);
        if (d != 2) {
            std::vector<double> levels(d);
            for (std::size_t i = 0; i < d; ++i) levels[i] = static_cast<double>(i);
            sys = ThermalSystem(n, levels, kT <= 0 ? std::numeric_limits<double>::infinity()
                                                   : 1.0 / kT);
        }
        outcome = apply_protocol(bell_basis_unitary(d, n), sys);
        results["mi_max_bound"] = mi_max_bound(sys);
    } else if (name == "verstraete") {
        outcome = verstraete_protocol(ThermalSystem::qubits(2, kT));
    } else if (name == "ghz") {
        outcome = ghz_subspace_protocol(ThermalSystem::qubits(n, kT),
                                        BipartitionVariant::AllBipartitions);
        results["work_closed_form"] =
            protocol_work_closed_form(WorkProtocol::Ghz, n, ThermalSystem::qubits(n, kT));
    } else if (name == "ghz-single") {
        const std::size_t j = static_cast<std::size_t>(number_or(cfg, "k", 1));
        inputs["j"] = j;
        outcome = ghz_subspace_protocol(ThermalSystem::qubits(n, kT),
                                        BipartitionVariant::SingleBipartition, j);
    } else if (name == "xstate") {
        outcome = xstate_protocol(ThermalSystem::qubits(n, kT));
    } else if (name == "dicke" || name == "wstate") {
        const std::size_t k =
            name == "wstate" ? 1 : static_cast<std::size_t>(number_or(cfg, "k", 1));
        inputs["k"] = k;
        const auto sys = ThermalSystem::qubits(n, kT);
        outcome = dicke_protocol(sys, k);
        if (k == 1) {
            const auto cmp = wstate_work_comparison(sys);
            results["work_closed_form"] = cmp.closed_form;
            results["work_direct"] = cmp.direct;
            if (cmp.discrepancy > 1e-6)
                diagnostics["closed_form_discrepancy"] = cmp.discrepancy;
        }
    } else if (name == "circulant") {
        const std::size_t d = static_cast<std::size_t>(number_or(cfg, "d", 2));
        std::vector<double> levels(d);
        for (std::size_t i = 0; i < d; ++i) levels[i] = static_cast<double>(i);
        const ThermalSystem sys(2, levels,
                                kT <= 0 ? std::numeric_limits<double>::infinity() : 1.0 / kT);
        const double deltaE = require_number(cfg, "deltaE");
        inputs["d"] = d;
        inputs["deltaE"] = deltaE;
        const double beta_prime = solve_beta_prime(sys, deltaE);
        outcome = circulant_heating_protocol(sys, beta_prime);
        results["beta_prime"] = beta_prime;
        results["mi_energy_bound"] = mi_energy_bound(sys, deltaE);
    } else {
        throw BadProtocolError("unknown protocol name: " + name);
    }
    results["work"] = outcome.work;
    for (const auto& [k, v] : outcome.measures) results[k] = v;
    diagnostics["dense_state"] = outcome.final_state.has_value();
    return nlohmann::json{{"inputs", inputs}, {"results", results},
                          {"diagnostics", diagnostics}, {"version", kVersion}};
}

inline std::string curves_to_csv(const std::vector<SweepCurve>& curves) {
    std::ostringstream os;
    os << "deltaE_over_E";
    for (const auto& c : curves) os << "," << c.meta.measure << "_" << c.meta.method;
    os << "\n";
    for (std::size_t i = 0; i < curves.front().x.size(); ++i) {
        os << sig12(curves.front().x[i]);
        for (const auto& c : curves) os << "," << sig12(c.y[i]);
        os << "\n";
    }
    return os.str();
}

inline nlohmann::json curves_to_json(const std::vector<SweepCurve>& curves) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& c : curves) {
        nlohmann::json jc;
        jc["measure"] = c.meta.measure;
        jc["method"] = c.meta.method;
        jc["x"] = c.x;
        jc["y"] = c.y;
        arr.push_back(jc);
    }
    return arr;
}

} // namespace detail

/// Execute one parsed command. Returns the process exit status:
/// 0 success, 2 validation error, 1 internal error.
inline int run(const RunConfig& cfg) {
    try {
        switch (cfg.command) {
            case Command::SelfTest: {
                const auto rep = run_selftest(
                    static_cast<std::uint64_t>(detail::number_or(cfg, "seed", 42)),
                    static_cast<std::size_t>(detail::number_or(cfg, "trials", 1000)));
                std::ostringstream os;
                os << (rep.ok() ? "[PASS]" : "[FAIL]") << " selftest: " << rep.checks
                   << " checks over " << rep.trials << " trials, " << rep.violations
                   << " violations\n";
                for (const auto& f : rep.failures) os << "  " << f << "\n";
                detail::emit(cfg, os.str());
                return rep.ok() ? 0 : 1;
            }
            case Command::Threshold: {
                auto j = detail::run_threshold(cfg);
                detail::emit(cfg, j.dump(2) + "\n");
                return 0;
            }
            case Command::Protocol: {
                auto j = detail::run_protocol(cfg);
                detail::emit(cfg, j.dump(2) + "\n");
                return 0;
            }
            case Command::Optimize: {
                const double kT = detail::require_number(cfg, "kT");
                const double deltaE = detail::require_number(cfg, "deltaE");
                if (kT <= 0 && deltaE < 0) throw PreconditionError("invalid optimize parameters");
                const auto sys = ThermalSystem::qubits(2, kT);
                const auto oc = detail::optimizer_config(cfg);
                const auto [c, u] = optimize_concurrence_constrained(sys, deltaE, oc);
                const auto [ca, angles] = ansatz_two_angle(sys, deltaE);
                nlohmann::json j;
                j["inputs"] = {{"kT_over_E", kT}, {"deltaE", deltaE},
                               {"restarts", oc.restarts}, {"seed", oc.seed}};
                j["results"] = {{"concurrence", c},
                                {"concurrence_ansatz", ca},
                                {"cmax_unlimited",
                                 cmax_thermal_2q(ThermalSystem::qubits(2, kT)
                                                     .local_populations()[0])}};
                j["diagnostics"] = {{"ansatz_theta1", angles.first},
                                    {"ansatz_theta2", angles.second}};
                j["version"] = kVersion;
                detail::emit(cfg, j.dump(2) + "\n");
                return 0;
            }
            case Command::Sweep: {
                const std::string kind_s = detail::require_string(cfg, "kind");
                const double kT = detail::require_number(cfg, "kT");
                const std::size_t points =
                    static_cast<std::size_t>(detail::number_or(cfg, "points", 32));
                const auto kind = sweep_kind_from_string(kind_s);
                const auto curves = sweep_curve(kind, kT, points, detail::optimizer_config(cfg));
                if (cfg.format == OutputFormat::Csv) {
                    detail::emit(cfg, detail::curves_to_csv(curves));
                } else {
                    nlohmann::json j;
                    j["inputs"] = {{"kind", kind_s}, {"kT_over_E", kT}, {"points", points}};
                    j["results"] = {{"curves", detail::curves_to_json(curves)}};
                    j["diagnostics"] = nlohmann::json::object();
                    j["version"] = kVersion;
                    detail::emit(cfg, j.dump(2) + "\n");
                }
                return 0;
            }
        }
        return 1;
    } catch (const PreconditionError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const BadProtocolError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
}

} // namespace thermocorr::cli
