// Command-line surface: thresholds, protocol runs, sweeps, and the
// energy-constrained optimizer, with CSV/JSON output for external plotting.

#include <CLI11.hpp>

#include <map>
#include <string>

#include "thermocorr/cli.hpp"

namespace {

void stash(std::map<std::string, std::string>& params, const std::string& key,
           const std::string& value) {
    if (!value.empty()) params[key] = value;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"thermocorr: correlations and entanglement from thermal states under unitaries"};
    app.require_subcommand(0, 1);

    bool selftest = false;
    std::string out_path, format = "json", seed, trials;
    app.add_flag("--selftest", selftest, "run the randomized invariant suite and exit");
    app.add_option("--out", out_path, "output file path (default stdout)");
    app.add_option("--format", format, "output format: json or csv")
        ->check(CLI::IsMember({"json", "csv"}));
    app.add_option("--seed", seed, "random seed");
    app.add_option("--trials", trials, "selftest trial count");

    std::string family, name, kind, n, k, kT, deltaE, points, restarts, d;

    auto* thr = app.add_subcommand("threshold", "solve a critical-temperature family");
    thr->add_option("--family", family,
                    "two-qubit | all-bip | single-bip | gme-ghz | gme-dicke | upper-qubit-qudit")
        ->required();
    thr->add_option("--n", n, "subsystem count");
    thr->add_option("--k", k, "Dicke excitation number");

    auto* prot = app.add_subcommand("protocol", "run a protocol pipeline");
    prot->add_option("--name", name,
                     "bell | verstraete | ghz | ghz-single | xstate | dicke | wstate | circulant")
        ->required();
    prot->add_option("--n", n, "subsystem count");
    prot->add_option("--d", d, "local dimension (bell, circulant)");
    prot->add_option("--k", k, "excitations (dicke) or bipartition j (ghz-single)");
    prot->add_option("--kT", kT, "temperature k_B T / E")->required();
    prot->add_option("--deltaE", deltaE, "energy budget (circulant)");

    auto* sw = app.add_subcommand("sweep", "tabulate a measure against the energy budget");
    sw->add_option("--kind", kind, "mi-vs-energy | concurrence-vs-energy")->required();
    sw->add_option("--kT", kT, "temperature k_B T / E")->required();
    sw->add_option("--points", points, "grid size");
    sw->add_option("--restarts", restarts, "optimizer restarts");

    auto* opt = app.add_subcommand("optimize", "energy-constrained concurrence maximization");
    opt->add_option("--kT", kT, "temperature k_B T / E")->required();
    opt->add_option("--deltaE", deltaE, "energy budget")->required();
    opt->add_option("--restarts", restarts, "optimizer restarts");

    CLI11_PARSE(app, argc, argv);

    thermocorr::cli::RunConfig cfg;
    cfg.output_path = out_path;
    cfg.format = format == "csv" ? thermocorr::cli::OutputFormat::Csv
                                 : thermocorr::cli::OutputFormat::Json;
    stash(cfg.params, "family", family);
    stash(cfg.params, "name", name);
    stash(cfg.params, "kind", kind);
    stash(cfg.params, "n", n);
    stash(cfg.params, "k", k);
    stash(cfg.params, "d", d);
    stash(cfg.params, "kT", kT);
    stash(cfg.params, "deltaE", deltaE);
    stash(cfg.params, "points", points);
    stash(cfg.params, "restarts", restarts);
    stash(cfg.params, "seed", seed);
    stash(cfg.params, "trials", trials);

    if (selftest) {
        cfg.command = thermocorr::cli::Command::SelfTest;
        return thermocorr::cli::run(cfg);
    }
    if (thr->parsed())
        cfg.command = thermocorr::cli::Command::Threshold;
    else if (prot->parsed())
        cfg.command = thermocorr::cli::Command::Protocol;
    else if (sw->parsed())
        cfg.command = thermocorr::cli::Command::Sweep;
    else if (opt->parsed())
        cfg.command = thermocorr::cli::Command::Optimize;
    else {
        std::cerr << app.help();
        return 2;
    }
    return thermocorr::cli::run(cfg);
}
