#include "afcsim/analyzer_sim.hpp"

#include <algorithm>
#include <cmath>

#include "afcsim/rng.hpp"

namespace afcsim {

void AnalyzerConfig::validate() const {
    if (bin_separation_s <= 0.0) throw ConfigError("analyzer: bin_separation_s must be > 0");
    if (timing_jitter_sigma_s < 0.0) throw ConfigError("analyzer: jitter must be >= 0");
    if (window_half_width_s <= 0.0 || window_half_width_s >= bin_separation_s / 2.0)
        throw ConfigError("analyzer: window_half_width_s must lie in (0, bin_separation/2)");
}

void DetectorParams::validate() const {
    if (eta_795 < 0.0 || eta_795 > 1.0 || eta_1532 < 0.0 || eta_1532 > 1.0)
        throw ConfigError("detector efficiencies must lie in [0,1]");
    if (accidental_rate_hz < 0.0) throw ConfigError("accidental rate must be >= 0");
}

long long TimeHistogram::total() const {
    long long t = 0;
    for (long long c : counts) t += c;
    return t;
}

namespace {

double born(const DensityMatrix4& rho, const MeasurementSetting& a,
            const MeasurementSetting& b) {
    return expectation(rho, tensor(projector(a), projector(b)));
}

} // namespace

double joint_probability(const DensityMatrix4& rho, const MeasurementSetting& a,
                         const MeasurementSetting& b) {
    // Evaluate the canonical +b ratio; the -b request is its exact
    // complement so that P(a,b) + P(a,-b) == 1 without roundoff.
    const MeasurementSetting b_plus{b.axis, Sign::plus};
    const double n = born(rho, a, b_plus);
    const double m = born(rho, a, b_plus.opposite());
    const double denom = n + m;
    if (denom <= 0.0)
        throw NumericalError("joint_probability: degenerate setting, zero denominator for " +
                             format_setting(a) + ":" + format_setting(b));
    const double p_plus = n / denom;
    return b.sign == Sign::plus ? p_plus : 1.0 - p_plus;
}

double expected_coincidences(const DensityMatrix4& rho, const MeasurementSetting& a,
                             const MeasurementSetting& b, double pairs_emitted,
                             const DetectorParams& det, double recall_probability,
                             double integration_s) {
    if (pairs_emitted < 0.0) throw ConfigError("pairs_emitted must be >= 0");
    det.validate();
    const double signal =
        pairs_emitted * born(rho, a, b) * det.eta_795 * det.eta_1532 * recall_probability;
    return signal + det.accidental_rate_hz * integration_s;
}

std::vector<CoincidenceRecord> simulate_counts(
    const DensityMatrix4& rho,
    const std::vector<std::pair<MeasurementSetting, MeasurementSetting>>& settings,
    const RunPlan& plan, const DetectorParams& det, std::uint64_t seed) {
    std::vector<CoincidenceRecord> out;
    out.reserve(settings.size());
    const double pairs = plan.pair_rate_hz * plan.integration_s;
    for (const auto& [a, b] : settings) {
        const double mean = expected_coincidences(rho, a, b, pairs, det,
                                                  plan.recall_probability, plan.integration_s);
        Rng rng(seed, "counts/" + format_setting(a) + ":" + format_setting(b));
        out.push_back({a, b, rng.poisson(mean), plan.integration_s});
    }
    return out;
}

TimeHistogram time_histogram(const DensityMatrix4& rho, const MeasurementSetting& a,
                             const MeasurementSetting& b, const AnalyzerConfig& cfg_a,
                             const AnalyzerConfig& cfg_b, long long total_coincidences,
                             std::uint64_t seed, double accidental_fraction) {
    cfg_a.validate();
    cfg_b.validate();
    if (cfg_a.bin_separation_s != cfg_b.bin_separation_s)
        throw ConfigError("time_histogram: analyzers disagree on bin separation");
    if (total_coincidences < 0) throw ConfigError("total_coincidences must be >= 0");
    if (accidental_fraction < 0.0 || accidental_fraction > 1.0)
        throw ConfigError("accidental_fraction must lie in [0,1]");
    const double T = cfg_a.bin_separation_s;
    const double jitter = std::max(cfg_a.timing_jitter_sigma_s, cfg_b.timing_jitter_sigma_s);
    if (jitter >= T / 4.0)
        throw ConfigError("time_histogram: jitter too large, peaks unresolvable");

    // Peak weights at time differences {-T, 0, +T}.
    double w_minus = 0.0, w_center = 0.0, w_plus = 0.0;
    const bool both_delay =
        cfg_a.kind == AnalyzerKind::delay_line && cfg_b.kind == AnalyzerKind::delay_line;
    if (both_delay) {
        // Time-bin outcomes read off directly: difference = t_a - t_b.
        const MeasurementSetting ze{Axis::z, Sign::plus}, zl{Axis::z, Sign::minus};
        const double p_ee = born(rho, ze, ze);
        const double p_el = born(rho, ze, zl);
        const double p_le = born(rho, zl, ze);
        const double p_ll = born(rho, zl, zl);
        w_minus = p_el;
        w_plus = p_le;
        w_center = p_ee + p_ll;
    } else {
        // Interferometer model: interfering paths in the central peak,
        // the two non-interfering path combinations at +-T.
        w_center = born(rho, a, b) / 2.0;
        w_minus = 0.25;
        w_plus = 0.25;
    }
    const double w_sum = w_minus + w_center + w_plus;

    TimeHistogram hist;
    const std::size_t bins = 201;
    const double lo = -2.0 * T, hi = 2.0 * T;
    const double width = (hi - lo) / static_cast<double>(bins);
    hist.edges.resize(bins + 1);
    for (std::size_t i = 0; i <= bins; ++i) hist.edges[i] = lo + width * static_cast<double>(i);
    hist.counts.assign(bins, 0);
    if (total_coincidences == 0) return hist;

    const double peak_time[3] = {-T, 0.0, T};
    const double peak_weight[3] = {w_minus / w_sum, w_center / w_sum, w_plus / w_sum};

    auto peak_mass = [&](double t_peak, double e_lo, double e_hi) {
        if (jitter == 0.0) return (t_peak >= e_lo && t_peak < e_hi) ? 1.0 : 0.0;
        const double inv = 1.0 / (jitter * 1.4142135623730951);
        return 0.5 * (std::erf((e_hi - t_peak) * inv) - std::erf((e_lo - t_peak) * inv));
    };

    Rng rng(seed, "hist/" + format_setting(a) + ":" + format_setting(b));
    const double signal = static_cast<double>(total_coincidences) * (1.0 - accidental_fraction);
    const double flat = static_cast<double>(total_coincidences) * accidental_fraction /
                        static_cast<double>(bins);
    for (std::size_t i = 0; i < bins; ++i) {
        double mean = flat;
        for (int p = 0; p < 3; ++p)
            mean += signal * peak_weight[p] * peak_mass(peak_time[p], hist.edges[i], hist.edges[i + 1]);
        hist.counts[i] = rng.poisson(mean);
    }
    return hist;
}

long long window_select(const TimeHistogram& hist, double center_s, double half_width_s) {
    if (half_width_s < 0.0) throw ConfigError("window_select: half width must be >= 0");
    if (center_s - half_width_s < hist.edges.front() ||
        center_s + half_width_s > hist.edges.back())
        throw ConfigError("window_select: window outside histogram span");
    long long sum = 0;
    for (std::size_t i = 0; i < hist.bins(); ++i) {
        const double c = hist.bin_center(i);
        if (c >= center_s - half_width_s && c <= center_s + half_width_s) sum += hist.counts[i];
    }
    return sum;
}

std::vector<std::pair<MeasurementSetting, MeasurementSetting>> table_settings() {
    using S = MeasurementSetting;
    const S px{Axis::x, Sign::plus}, py{Axis::y, Sign::plus};
    const S pz{Axis::z, Sign::plus}, mz{Axis::z, Sign::minus};
    return {
        {px, px}, {px, py}, {px, pz}, {px, mz},
        {py, px}, {py, py}, {py, pz}, {py, mz},
        {pz, px}, {pz, py}, {pz, pz}, {pz, mz},
        {mz, px}, {mz, py}, {mz, pz}, {mz, mz},
    };
}

std::vector<std::pair<MeasurementSetting, MeasurementSetting>> table_settings_with_partners() {
    auto out = table_settings();
    for (const auto& [a, b] : table_settings()) {
        const std::pair<MeasurementSetting, MeasurementSetting> partner{a, b.opposite()};
        bool present = false;
        for (const auto& s : out) present = present || s == partner;
        if (!present) out.push_back(partner);
    }
    return out;
}

std::vector<std::pair<MeasurementSetting, MeasurementSetting>> full_settings() {
    std::vector<std::pair<MeasurementSetting, MeasurementSetting>> out;
    for (Axis aa : {Axis::x, Axis::y, Axis::z})
        for (Sign as : {Sign::plus, Sign::minus})
            for (Axis ba : {Axis::x, Axis::y, Axis::z})
                for (Sign bs : {Sign::plus, Sign::minus})
                    out.push_back({{aa, as}, {ba, bs}});
    return out;
}

} // namespace afcsim
