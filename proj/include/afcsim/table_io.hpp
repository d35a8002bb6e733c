#ifndef AFCSIM_TABLE_IO_HPP
#define AFCSIM_TABLE_IO_HPP

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "afcsim/afc_memory.hpp"
#include "afcsim/analyzer_sim.hpp"
#include "afcsim/metrics.hpp"
#include "afcsim/states.hpp"
#include "afcsim/tomography.hpp"

namespace afcsim {

// Shortest-faithful decimal formatting used by every writer (17 significant
// digits round-trips a double exactly).
std::string format_g17(double v);

// Density matrix record: two 4x4 real arrays named "re" and "im". The
// reader validates the DensityMatrix4 invariants.
void write_density_record(const std::string& path, const Matrix4& rho);
DensityMatrix4 read_density_record(const std::string& path);

// Probability table, CSV: setting_a,setting_b,probability,sigma
void write_probability_table(const std::string& path, const MeasurementDataset& dataset);
MeasurementDataset read_probability_table(const std::string& path);

// Counts table, CSV: setting_a,setting_b,counts,integration_s
void write_counts_table(const std::string& path, const std::vector<CoincidenceRecord>& records);
std::vector<CoincidenceRecord> read_counts_table(const std::string& path);

// Reads either table format (detected from the header) and returns a
// dataset; counts tables go through the Eq.-2 conversion.
MeasurementDataset read_dataset(const std::string& path);

// Metrics record: flat named reals, optional per-metric sigmas.
void write_metrics_record(const std::string& path, const MetricsReport& report,
                          const std::map<std::string, double>& sigmas = {});
std::pair<MetricsReport, std::map<std::string, double>> read_metrics_record(
    const std::string& path);

// Reconstruction diagnostics (objective, iterations, residuals, ...).
void write_diagnostics_record(const std::string& path, const TomographyResult& result);

// Plot data: tab-separated two-column files.
void write_comb_profile_tsv(const std::string& path, const std::vector<double>& detuning_hz,
                            const std::vector<double>& optical_depth);
void write_echo_table_tsv(const std::string& path,
                          const std::vector<std::pair<double, double>>& time_intensity);
void write_histogram_tsv(const std::string& path, const TimeHistogram& hist);

struct Table2Row {
    double purity = 0.0, purity_sigma = 0.0;
    double concurrence = 0.0, concurrence_sigma = 0.0;
    double eof = 0.0, eof_sigma = 0.0;
    double s_max = 0.0, s_max_sigma = 0.0;
    double fidelity_phi_plus = 0.0, fidelity_phi_plus_sigma = 0.0;
};

// The published tables, shipped as a data file (values as fractions,
// s_max absolute).
struct PaperBaseline {
    MeasurementDataset pin;
    MeasurementDataset pout;
    Table2Row rho_in;
    Table2Row rho_out;
    double io_fidelity = 0.0;
    double io_fidelity_sigma = 0.0;
};

PaperBaseline read_paper_baseline(const std::string& path);

// Repository data directory: $AFCSIM_DATA_DIR if set, ./data if present,
// else the configured source-tree path.
std::string data_dir();

} // namespace afcsim

#endif
