#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "afcsim/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Time-bin entanglement storage in an AFC memory: simulation, "
                 "tomography and entanglement analysis"};
    app.require_subcommand(1);

    std::string config_path, out_dir, data_path, in_dir, baseline_path;
    int resamples = 300;
    std::uint64_t seed = 0x5eed;

    CLI::App* sim = app.add_subcommand("simulate", "run the full two-arm experiment");
    sim->add_option("--config", config_path, "run configuration (JSON)")->required();
    sim->add_option("--out", out_dir, "output directory")->required();

    CLI::App* tomo = app.add_subcommand("tomography", "reconstruct a state from a table");
    tomo->add_option("--data", data_path, "probabilities or counts table (CSV)")->required();
    tomo->add_option("--resamples", resamples, "Monte Carlo resamples (>= 100)");
    tomo->add_option("--seed", seed, "random seed");
    tomo->add_option("--out", out_dir, "output directory")->required();

    CLI::App* afc = app.add_subcommand("afc", "comb design table, profile and echo orders");
    afc->add_option("--config", config_path, "run configuration (JSON)")->required();
    afc->add_option("--out", out_dir, "output directory")->required();

    CLI::App* rep = app.add_subcommand("report", "render tables from prior outputs");
    rep->add_option("--in", in_dir, "directory with simulate/tomography outputs")->required();
    rep->add_option("--paper-baseline", baseline_path, "published-values file (JSON)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : afcsim::kExitConfig;
    }

    if (sim->parsed()) return afcsim::cmd_simulate(config_path, out_dir);
    if (tomo->parsed()) return afcsim::cmd_tomography(data_path, resamples, seed, out_dir);
    if (afc->parsed()) return afcsim::cmd_afc(config_path, out_dir);
    if (rep->parsed()) return afcsim::cmd_report(in_dir, baseline_path, std::cout);
    return afcsim::kExitConfig;
}
