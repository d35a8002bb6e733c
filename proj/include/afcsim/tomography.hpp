#ifndef AFCSIM_TOMOGRAPHY_HPP
#define AFCSIM_TOMOGRAPHY_HPP

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "afcsim/analyzer_sim.hpp"
#include "afcsim/states.hpp"

namespace afcsim {

struct DatasetEntry {
    MeasurementSetting setting_a;
    MeasurementSetting setting_b;
    double value = 0.0;  // normalized joint-detection probability
    double sigma = 0.0;  // one-sigma uncertainty (0 = unweighted entry)
    // Raw coincidences behind the ratio, kept for Poisson resampling.
    double counts = -1.0;
    double counts_opposite = -1.0;

    bool has_counts() const { return counts >= 0.0 && counts_opposite >= 0.0; }
};

struct MeasurementDataset {
    std::vector<DatasetEntry> entries;

    void validate() const;  // no duplicate pairs, values in [0,1], sigmas >= 0
    bool from_counts() const;
    const DatasetEntry* find(const MeasurementSetting& a, const MeasurementSetting& b) const;
};

// Eq. 2 conversion with binomial uncertainties; every record needs its
// opposite-b partner in the list.
MeasurementDataset dataset_from_counts(const std::vector<CoincidenceRecord>& records);

// Exact model probabilities of a known state over a list of settings
// (round-trip oracle input; `sigma` applies to every entry).
MeasurementDataset exact_probabilities(
    const DensityMatrix4& rho,
    const std::vector<std::pair<MeasurementSetting, MeasurementSetting>>& settings,
    double sigma = 0.01);

// Cholesky-style physical parametrization: theta (16 reals) fills a lower
// triangular T (4 real diagonal slots, 6 complex below-diagonal pairs) and
// rho = T^dag T / tr(T^dag T), which is PSD with unit trace for any
// nonzero theta.
Matrix4 physical_parametrization(const std::array<double, 16>& theta);

struct TomographyOptions {
    std::uint64_t seed = 0x5eed;
    int random_starts = 16;
    int max_iterations = 500;
    double gradient_tol = 1e-8;
    double step_tol = 1e-10;
    bool compute_hessian = true;
    // Optional extra start (used to warm-start Monte Carlo resamples).
    std::optional<std::array<double, 16>> warm_start;
};

struct TomographyResult {
    DensityMatrix4 rho_hat;
    double objective_value = 0.0;
    int iterations = 0;
    bool converged = false;
    std::vector<double> residuals;         // model - value, dataset order
    std::vector<double> start_objectives;  // one per start, start order
    double hessian_condition = 0.0;        // gauge direction projected out
    std::array<double, 16> theta{};        // winning parameter vector
};

// Weighted-least-squares maximum likelihood reconstruction. Starts from the
// physical projection of the linear inversion estimate plus
// options.random_starts seeded random points; the lowest objective wins and
// ties keep the earliest start.
TomographyResult mle_reconstruct(const MeasurementDataset& dataset,
                                 const TomographyOptions& options = {});

enum class MetricKind { purity, concurrence, eof, s_max, fidelity_phi_plus };

std::string metric_name(MetricKind kind);
std::vector<MetricKind> all_metrics();

struct MetricStats {
    double mean = 0.0;
    double sigma = 0.0;
};

struct MonteCarloReport {
    std::map<MetricKind, MetricStats> stats;
    int resamples = 0;
    std::uint64_t seed = 0;
};

// Parametric bootstrap: probability entries are resampled as clipped
// gaussians around their values, counts-backed entries as Poisson draws,
// and each resample is reconstructed (warm-started at the base fit).
MonteCarloReport monte_carlo_uncertainty(
    const MeasurementDataset& dataset, int n_resamples, std::uint64_t seed,
    const std::vector<MetricKind>& metrics = {MetricKind::purity, MetricKind::concurrence,
                                              MetricKind::eof, MetricKind::s_max,
                                              MetricKind::fidelity_phi_plus},
    const TomographyOptions& options = {});

// Same resampling applied jointly to two datasets; reports the Uhlmann
// fidelity between the two reconstructions.
MetricStats monte_carlo_io_fidelity(const MeasurementDataset& dataset_in,
                                    const MeasurementDataset& dataset_out, int n_resamples,
                                    std::uint64_t seed, const TomographyOptions& options = {});

// 0.5 * ||rho - sigma||_1, used by the round-trip checks.
double trace_distance(const DensityMatrix4& rho, const DensityMatrix4& sigma);

} // namespace afcsim

#endif
