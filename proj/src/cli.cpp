#include "afcsim/cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "afcsim/metrics.hpp"
#include "afcsim/rng.hpp"
#include "afcsim/tomography.hpp"

namespace afcsim {

namespace fs = std::filesystem;

namespace {

int exit_code_for(const Error& e) {
    if (dynamic_cast<const IoError*>(&e)) return kExitIo;
    if (dynamic_cast<const NumericalError*>(&e)) return kExitNumerical;
    return kExitConfig;  // ConfigError, ParseError
}

template <typename Fn>
int guarded(Fn&& fn) {
    try {
        return fn();
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNumerical;
    }
}

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create directory " + dir + ": " + ec.message());
}

std::map<std::string, double> sigma_map(const MonteCarloReport& mc) {
    std::map<std::string, double> out;
    for (const auto& [kind, stats] : mc.stats) out[metric_name(kind)] = stats.sigma;
    return out;
}

} // namespace

ExperimentReport run_simulate(const RunConfig& config) {
    config.validate();
    const DensityMatrix4 rho_source = source_state(config.source);
    const auto [rho_stored, recall] = apply_memory(rho_source, config.memory);

    const auto settings = table_settings_with_partners();
    RunPlan plan_in{config.source.pair_rate_hz, config.integration_in_s, 1.0};
    RunPlan plan_out{config.source.pair_rate_hz, config.integration_out_s, recall};
    const std::uint64_t seed_in = Rng(config.seed, "sim/in").next_u64();
    const std::uint64_t seed_out = Rng(config.seed, "sim/out").next_u64();
    const auto counts_in =
        simulate_counts(rho_source, settings, plan_in, config.detectors, seed_in);
    const auto counts_out =
        simulate_counts(rho_stored, settings, plan_out, config.detectors, seed_out);

    ExperimentReport report;
    report.probabilities_in = dataset_from_counts(counts_in);
    report.probabilities_out = dataset_from_counts(counts_out);

    TomographyOptions options;
    options.seed = Rng(config.seed, "sim/mle").next_u64();
    const TomographyResult fit_in = mle_reconstruct(report.probabilities_in, options);
    const TomographyResult fit_out = mle_reconstruct(report.probabilities_out, options);
    report.converged = fit_in.converged && fit_out.converged;
    report.rho_in = fit_in.rho_hat.matrix();
    report.rho_out = fit_out.rho_hat.matrix();

    const DensityMatrix4 reference = bell_phi_plus();
    report.metrics_in = metrics_report(fit_in.rho_hat, reference);
    report.metrics_out = metrics_report(fit_out.rho_hat, reference);
    report.io_fidelity = fidelity(fit_in.rho_hat, fit_out.rho_hat);

    const std::uint64_t seed_mc = Rng(config.seed, "sim/mc").next_u64();
    const MonteCarloReport mc_in =
        monte_carlo_uncertainty(report.probabilities_in, config.resamples, seed_mc,
                                all_metrics(), options);
    const MonteCarloReport mc_out = monte_carlo_uncertainty(
        report.probabilities_out, config.resamples, seed_mc, all_metrics(), options);
    report.sigmas_in = sigma_map(mc_in);
    report.sigmas_out = sigma_map(mc_out);
    report.io_fidelity_sigma =
        monte_carlo_io_fidelity(report.probabilities_in, report.probabilities_out,
                                config.resamples, seed_mc, options)
            .sigma;
    return report;
}

namespace {

void default_metric_sigmas(std::map<std::string, double>& sigmas) {
    for (const char* name :
         {"purity", "concurrence", "eof_normalized", "s_max", "fidelity_phi_plus"})
        sigmas.emplace(name, 0.0);
}

} // namespace

int cmd_simulate(const std::string& config_path, const std::string& out_dir) {
    return guarded([&] {
        const RunConfig config = load_run_config(config_path);
        ensure_dir(out_dir);
        const ExperimentReport report = run_simulate(config);

        write_probability_table(out_dir + "/probabilities_in.csv", report.probabilities_in);
        write_probability_table(out_dir + "/probabilities_out.csv", report.probabilities_out);
        write_density_record(out_dir + "/rho_in.json", report.rho_in);
        write_density_record(out_dir + "/rho_out.json", report.rho_out);
        write_metrics_record(out_dir + "/metrics_in.json", report.metrics_in, report.sigmas_in);
        write_metrics_record(out_dir + "/metrics_out.json", report.metrics_out,
                             report.sigmas_out);
        {
            std::ofstream io(out_dir + "/io_fidelity.json");
            if (!io) throw IoError("cannot write " + out_dir + "/io_fidelity.json");
            io << "{\n  \"io_fidelity\": " << format_g17(report.io_fidelity)
               << ",\n  \"io_fidelity_sigma\": " << format_g17(report.io_fidelity_sigma)
               << "\n}\n";
        }
        // Fig.-3b-style arrival-time histogram of the memory arm, z x z.
        const RunConfig& c = config;
        const auto [rho_stored, recall] = apply_memory(source_state(c.source), c.memory);
        (void)recall;
        AnalyzerConfig delay_a = c.analyzer_795, delay_b = c.analyzer_1532;
        delay_a.kind = AnalyzerKind::delay_line;
        delay_b.kind = AnalyzerKind::delay_line;
        const MeasurementSetting pz{Axis::z, Sign::plus};
        const TimeHistogram hist =
            time_histogram(rho_stored, pz, pz, delay_a, delay_b, 20000,
                           Rng(c.seed, "sim/hist").next_u64());
        write_histogram_tsv(out_dir + "/histogram_out_zz.tsv", hist);

        return report.converged ? kExitOk : kExitNumerical;
    });
}

int cmd_tomography(const std::string& data_path, int resamples, std::uint64_t seed,
                   const std::string& out_dir) {
    return guarded([&] {
        const MeasurementDataset dataset = read_dataset(data_path);
        ensure_dir(out_dir);

        TomographyOptions options;
        options.seed = seed;
        const TomographyResult fit = mle_reconstruct(dataset, options);
        if (dataset.entries.size() < 15 || fit.hessian_condition > 1e8) {
            std::ostringstream warn;
            warn << "warning: reconstruction is under-determined (" << dataset.entries.size()
                 << " settings, Hessian condition " << fit.hessian_condition << ")";
            std::cerr << warn.str() << '\n';
        }

        const MonteCarloReport mc =
            monte_carlo_uncertainty(dataset, resamples, seed, all_metrics(), options);
        std::map<std::string, double> sigmas = sigma_map(mc);
        default_metric_sigmas(sigmas);

        write_probability_table(out_dir + "/probabilities.csv", dataset);
        write_density_record(out_dir + "/rho.json", fit.rho_hat.matrix());
        write_metrics_record(out_dir + "/metrics.json",
                             metrics_report(fit.rho_hat, bell_phi_plus()), sigmas);
        write_diagnostics_record(out_dir + "/diagnostics.json", fit);
        return fit.converged ? kExitOk : kExitNumerical;
    });
}

int cmd_afc(const std::string& config_path, const std::string& out_dir) {
    return guarded([&] {
        const RunConfig config = load_run_config(config_path);
        ensure_dir(out_dir);
        const CombParams& comb = config.comb;
        const double delta = comb_spacing_from_chirp(config.chirp);
        const double ts = storage_time(delta);
        const double f = finesse(comb);
        const double fwd = efficiency_forward(comb.d1, f, comb.d0);
        const double bwd = efficiency_backward(comb.d1, f);
        const double ceiling = efficiency_forward(2.0 * f, f, 0.0);  // optimum at d1 = 2F

        const auto echoes = echo_time_table(comb);

        std::ofstream out(out_dir + "/afc_design.txt");
        if (!out) throw IoError("cannot write " + out_dir + "/afc_design.txt");
        out << "tooth_spacing_hz\t" << format_g17(delta) << '\n'
            << "storage_time_s\t" << format_g17(ts) << '\n'
            << "finesse\t" << format_g17(f) << '\n'
            << "efficiency_forward\t" << format_g17(fwd) << '\n'
            << "efficiency_backward\t" << format_g17(bwd) << '\n'
            << "forward_ceiling_at_d1_eq_2F\t" << format_g17(ceiling) << '\n'
            << "chirp_T_s_delta_over_alpha\t"
            << format_g17(config.chirp.delta_beat_hz / config.chirp.alpha_hz_per_s) << '\n';

        write_echo_table_tsv(out_dir + "/echo_orders.tsv", echoes);

        std::vector<double> grid, depth;
        const int samples_per_period = 256, periods = 8;
        for (int i = 0; i <= samples_per_period * periods; ++i)
            grid.push_back(-0.5 * periods * comb.delta_hz +
                           comb.delta_hz * static_cast<double>(i) / samples_per_period);
        depth = comb_profile(comb, grid);
        write_comb_profile_tsv(out_dir + "/comb_profile.tsv", grid, depth);
        return kExitOk;
    });
}

namespace {

struct ReportInputs {
    std::optional<MeasurementDataset> pin, pout;
    std::optional<std::pair<MetricsReport, std::map<std::string, double>>> min, mout;
    std::optional<std::pair<double, double>> io_fidelity;
};

ReportInputs gather_inputs(const std::string& dir) {
    ReportInputs in;
    auto have = [&](const std::string& name) { return fs::exists(dir + "/" + name); };

    const bool dual = have("metrics_in.json") || have("metrics_out.json");
    const bool single = have("metrics.json");
    if (dual && single)
        throw ConfigError("report: both metrics.json and metrics_in/out.json present in " + dir +
                          "; ambiguous inputs");
    if (!dual && !single) throw ConfigError("report: no metrics records found in " + dir);

    if (single) {
        in.min = read_metrics_record(dir + "/metrics.json");
        if (have("probabilities.csv")) in.pin = read_probability_table(dir + "/probabilities.csv");
        return in;
    }
    if (have("metrics_in.json")) in.min = read_metrics_record(dir + "/metrics_in.json");
    if (have("metrics_out.json")) in.mout = read_metrics_record(dir + "/metrics_out.json");
    if (have("probabilities_in.csv"))
        in.pin = read_probability_table(dir + "/probabilities_in.csv");
    if (have("probabilities_out.csv"))
        in.pout = read_probability_table(dir + "/probabilities_out.csv");
    if (have("io_fidelity.json")) {
        std::ifstream f(dir + "/io_fidelity.json");
        nlohmann::json j;
        f >> j;
        in.io_fidelity = {j.at("io_fidelity").get<double>(),
                          j.at("io_fidelity_sigma").get<double>()};
    }
    return in;
}

void print_probability_block(std::ostream& out, const char* title,
                             const MeasurementDataset& model,
                             const MeasurementDataset* paper) {
    out << title << '\n';
    out << "  setting        model";
    if (paper) out << "      paper      z";
    out << '\n';
    for (const DatasetEntry& e : model.entries) {
        char buf[160];
        const std::string key = format_setting(e.setting_a) + ":" + format_setting(e.setting_b);
        if (paper) {
            const DatasetEntry* p = paper->find(e.setting_a, e.setting_b);
            if (p) {
                const double sig =
                    std::sqrt(e.sigma * e.sigma + p->sigma * p->sigma);
                const double z = sig > 0.0 ? (e.value - p->value) / sig : 0.0;
                std::snprintf(buf, sizeof(buf), "  %-8s %10.4f %10.4f %6.2f\n", key.c_str(),
                              e.value, p->value, z);
            } else {
                std::snprintf(buf, sizeof(buf), "  %-8s %10.4f          -      -\n", key.c_str(),
                              e.value);
            }
        } else {
            std::snprintf(buf, sizeof(buf), "  %-8s %10.4f\n", key.c_str(), e.value);
        }
        out << buf;
    }
}

void print_metrics_block(std::ostream& out, const char* title, const MetricsReport& m,
                         const std::map<std::string, double>& sigmas, const Table2Row* paper) {
    out << title << '\n';
    struct Row {
        const char* name;
        double value;
        double paper_value;
        double paper_sigma;
    };
    const Row rows[] = {
        {"purity", m.purity, paper ? paper->purity : 0.0, paper ? paper->purity_sigma : 0.0},
        {"concurrence", m.concurrence, paper ? paper->concurrence : 0.0,
         paper ? paper->concurrence_sigma : 0.0},
        {"eof_normalized", m.eof_normalized, paper ? paper->eof : 0.0,
         paper ? paper->eof_sigma : 0.0},
        {"s_max", m.s_max, paper ? paper->s_max : 0.0, paper ? paper->s_max_sigma : 0.0},
        {"fidelity_phi_plus", m.fidelity_phi_plus, paper ? paper->fidelity_phi_plus : 0.0,
         paper ? paper->fidelity_phi_plus_sigma : 0.0},
    };
    for (const Row& r : rows) {
        char buf[160];
        const auto it = sigmas.find(r.name);
        const double sigma = it != sigmas.end() ? it->second : 0.0;
        if (paper) {
            const double z = r.paper_sigma > 0.0 ? (r.value - r.paper_value) / r.paper_sigma : 0.0;
            std::snprintf(buf, sizeof(buf), "  %-18s %9.4f +- %.4f   paper %9.4f +- %.4f   z %6.2f\n",
                          r.name, r.value, sigma, r.paper_value, r.paper_sigma, z);
        } else {
            std::snprintf(buf, sizeof(buf), "  %-18s %9.4f +- %.4f\n", r.name, r.value, sigma);
        }
        out << buf;
    }
}

} // namespace

int cmd_report(const std::string& in_dir, const std::string& baseline_path, std::ostream& out) {
    return guarded([&] {
        const ReportInputs inputs = gather_inputs(in_dir);
        std::optional<PaperBaseline> baseline;
        if (!baseline_path.empty()) baseline = read_paper_baseline(baseline_path);

        if (inputs.pin)
            print_probability_block(out, "Joint-detection probabilities (input arm)",
                                    *inputs.pin, baseline ? &baseline->pin : nullptr);
        if (inputs.pout)
            print_probability_block(out, "Joint-detection probabilities (memory arm)",
                                    *inputs.pout, baseline ? &baseline->pout : nullptr);
        if (inputs.min)
            print_metrics_block(out, "State metrics (input arm)", inputs.min->first,
                                inputs.min->second, baseline ? &baseline->rho_in : nullptr);
        if (inputs.mout)
            print_metrics_block(out, "State metrics (memory arm)", inputs.mout->first,
                                inputs.mout->second, baseline ? &baseline->rho_out : nullptr);
        if (inputs.io_fidelity) {
            char buf[160];
            if (baseline) {
                const double z = (inputs.io_fidelity->first - baseline->io_fidelity) /
                                 baseline->io_fidelity_sigma;
                std::snprintf(buf, sizeof(buf),
                              "Input-output fidelity %9.4f +- %.4f   paper %9.4f +- %.4f   z %6.2f\n",
                              inputs.io_fidelity->first, inputs.io_fidelity->second,
                              baseline->io_fidelity, baseline->io_fidelity_sigma, z);
            } else {
                std::snprintf(buf, sizeof(buf), "Input-output fidelity %9.4f +- %.4f\n",
                              inputs.io_fidelity->first, inputs.io_fidelity->second);
            }
            out << buf;
        }
        return kExitOk;
    });
}

} // namespace afcsim
