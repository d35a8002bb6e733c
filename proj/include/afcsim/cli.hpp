#ifndef AFCSIM_CLI_HPP
#define AFCSIM_CLI_HPP

#include <cstdint>
#include <iosfwd>
#include <string>

#include "afcsim/run_config.hpp"
#include "afcsim/table_io.hpp"

namespace afcsim {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;      // configuration / parse errors
inline constexpr int kExitNumerical = 3;   // non-convergence, numerical failure
inline constexpr int kExitIo = 4;          // filesystem failures

// Full simulated experiment: both arms of the probability table, both
// reconstructions, metrics with Monte Carlo sigmas, input-output fidelity.
struct ExperimentReport {
    MeasurementDataset probabilities_in;
    MeasurementDataset probabilities_out;
    Matrix4 rho_in;
    Matrix4 rho_out;
    MetricsReport metrics_in;
    MetricsReport metrics_out;
    std::map<std::string, double> sigmas_in;
    std::map<std::string, double> sigmas_out;
    double io_fidelity = 0.0;
    double io_fidelity_sigma = 0.0;
    bool converged = true;
};

// Library entry point behind `simulate`; throws on invalid input.
ExperimentReport run_simulate(const RunConfig& config);

// Subcommands; each returns an exit code and reports errors on stderr.
int cmd_simulate(const std::string& config_path, const std::string& out_dir);
int cmd_tomography(const std::string& data_path, int resamples, std::uint64_t seed,
                   const std::string& out_dir);
int cmd_afc(const std::string& config_path, const std::string& out_dir);
int cmd_report(const std::string& in_dir, const std::string& baseline_path,
               std::ostream& out);

} // namespace afcsim

#endif
