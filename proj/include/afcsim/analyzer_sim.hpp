#ifndef AFCSIM_ANALYZER_SIM_HPP
#define AFCSIM_ANALYZER_SIM_HPP

#include <cstdint>
#include <utility>
#include <vector>

#include "afcsim/states.hpp"

namespace afcsim {

enum class AnalyzerKind { delay_line, interferometer };

struct AnalyzerConfig {
    AnalyzerKind kind = AnalyzerKind::interferometer;
    double interferometer_phase_rad = 0.0;
    double bin_separation_s = 1.4e-9;
    double timing_jitter_sigma_s = 100e-12;
    double window_half_width_s = 0.3e-9;

    void validate() const;
};

struct CoincidenceRecord {
    MeasurementSetting setting_a;
    MeasurementSetting setting_b;
    long long counts = 0;
    double integration_s = 0.0;
};

struct TimeHistogram {
    std::vector<double> edges;      // size bins+1, uniform width, seconds
    std::vector<long long> counts;  // size bins

    std::size_t bins() const { return counts.size(); }
    double bin_center(std::size_t i) const { return 0.5 * (edges[i] + edges[i + 1]); }
    long long total() const;
};

struct DetectorParams {
    double eta_795 = 1.0;
    double eta_1532 = 1.0;
    double accidental_rate_hz = 0.0;  // accidental coincidences per window per second

    void validate() const;
};

struct RunPlan {
    double pair_rate_hz = 0.0;       // emitted pairs per second
    double integration_s = 1.0;      // acquisition time per joint setting
    double recall_probability = 1.0; // memory/system recall for this arm
};

// Eq.-2 style normalized joint-detection probability computed from Born
// traces:  P = tr(rho Pa x Pb) / (tr(rho Pa x Pb) + tr(rho Pa x P-b)).
// The complement is returned as 1 - P of the canonical (+b) evaluation, so
// P(a,b) + P(a,-b) == 1 holds exactly in floating point.
double joint_probability(const DensityMatrix4& rho, const MeasurementSetting& a,
                         const MeasurementSetting& b);

// Expected coincidences for one joint setting; accidentals enter as a flat
// rate over the integration window.
double expected_coincidences(const DensityMatrix4& rho, const MeasurementSetting& a,
                             const MeasurementSetting& b, double pairs_emitted,
                             const DetectorParams& det, double recall_probability,
                             double integration_s = 1.0);

// Poisson-sampled coincidence records, one per joint setting. Every setting
// pair draws from its own substream of (seed, "+a:+b"), so the output is
// independent of evaluation order and bit-stable for a fixed seed.
std::vector<CoincidenceRecord> simulate_counts(
    const DensityMatrix4& rho,
    const std::vector<std::pair<MeasurementSetting, MeasurementSetting>>& settings,
    const RunPlan& plan, const DetectorParams& det, std::uint64_t seed);

// Arrival-time-difference histogram for one joint setting.
//
// Interferometer analyzers produce the three-peak structure at
// {-T, 0, +T}: the central peak carries Born/2, each side peak 1/4
// (non-interfering paths). A delay-line pair resolves the time-bin outcomes
// directly: peaks at -T (e,l), 0 (e,e and l,l), +T (l,e) weighted by the
// Born probabilities of the z-basis outcomes. Mixed pairs follow the
// interferometer model. `accidental_fraction` adds a flat floor.
TimeHistogram time_histogram(const DensityMatrix4& rho, const MeasurementSetting& a,
                             const MeasurementSetting& b, const AnalyzerConfig& cfg_a,
                             const AnalyzerConfig& cfg_b, long long total_coincidences,
                             std::uint64_t seed, double accidental_fraction = 0.0);

// Sum of the bins whose centers fall inside [center - half_width, center + half_width].
long long window_select(const TimeHistogram& hist, double center_s, double half_width_s);

// The 16 joint settings of the published probability table, in table order.
std::vector<std::pair<MeasurementSetting, MeasurementSetting>> table_settings();

// The same list closed under b -> -b (24 settings): what a counting run
// must acquire so every Eq.-2 ratio has its partner. The second analyzer
// output port supplies the -b counts for the x/y columns.
std::vector<std::pair<MeasurementSetting, MeasurementSetting>> table_settings_with_partners();

// All 36 sign/axis combinations; informationally complete for tomography.
std::vector<std::pair<MeasurementSetting, MeasurementSetting>> full_settings();

} // namespace afcsim

#endif
