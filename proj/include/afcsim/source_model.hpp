#ifndef AFCSIM_SOURCE_MODEL_HPP
#define AFCSIM_SOURCE_MODEL_HPP

#include <vector>

#include "afcsim/states.hpp"

namespace afcsim {

struct MeasurementDataset;  // tomography.hpp

// SPDC pair source. The two noise weights absorb everything that degrades
// the ideal Bell state (multi-pair emission, interferometer imperfections):
// p_deph mixes in the phase-dephased Bell state, p_white the maximally
// mixed state.
struct SourceParams {
    double p_deph = 0.0;
    double p_white = 0.0;
    double rep_rate_hz = 80e6;
    double bin_separation_s = 1.4e-9;
    double pair_rate_hz = 0.0;  // emitted pairs per second per joint setting

    void validate() const;
};

// |phi+><phi+| with |phi+> = (|e,e> + |l,l>)/sqrt(2)
DensityMatrix4 bell_phi_plus();

// rho = (1 - p_deph - p_white)|phi+><phi+|
//     + p_deph (|ee><ee| + |ll><ll|)/2 + p_white I/4
DensityMatrix4 source_state(const SourceParams& params);

// Weighted least squares of the two noise weights against a measured table
// of joint-detection probabilities. The residuals are linear in the
// weights, so after a coarse feasibility scan the constrained minimum is
// solved exactly over the simplex p_deph, p_white >= 0, p_deph+p_white <= 1.
SourceParams fit_source_params(const MeasurementDataset& probabilities);

} // namespace afcsim

#endif
