#ifndef AFCSIM_RUN_CONFIG_HPP
#define AFCSIM_RUN_CONFIG_HPP

#include <cstdint>
#include <string>

#include "afcsim/afc_memory.hpp"
#include "afcsim/analyzer_sim.hpp"
#include "afcsim/source_model.hpp"

namespace afcsim {

// One experiment run. All physical quantities carry unit suffixes in the
// configuration keys (delta_hz, bin_separation_s, ...); the seed is
// mandatory so every run is reproducible.
struct RunConfig {
    SourceParams source;
    CombParams comb;
    ChirpParams chirp;
    MemoryChannelParams memory;
    AnalyzerConfig analyzer_795;
    AnalyzerConfig analyzer_1532;
    DetectorParams detectors;
    std::uint64_t seed = 0;
    int resamples = 300;
    double integration_in_s = 300.0;     // per joint setting, source arm
    double integration_out_s = 18000.0;  // per joint setting, memory arm

    void validate() const;
};

RunConfig load_run_config(const std::string& path);
void write_run_config(const std::string& path, const RunConfig& config);

} // namespace afcsim

#endif
