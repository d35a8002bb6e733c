#ifndef AFCSIM_AFC_MEMORY_HPP
#define AFCSIM_AFC_MEMORY_HPP

#include <map>
#include <utility>
#include <vector>

#include "afcsim/states.hpp"

namespace afcsim {

enum class ToothShape { sinusoidal, gaussian, square };

struct CombParams {
    double delta_hz = 142.857e6;   // tooth spacing
    double gamma_hz = 71.4285e6;   // tooth linewidth (FWHM)
    double bandwidth_hz = 5e9;     // total comb width
    double d1 = 2.0;               // peak reversible optical depth
    double d0 = 0.0;               // irreversible background optical depth
    ToothShape tooth_shape = ToothShape::sinusoidal;

    void validate() const;
};

struct ChirpParams {
    double delta_beat_hz = 0.35e6;  // AOM two-tone difference
    double alpha_hz_per_s = 5.0e13; // sweep rate
    double sweep_start_hz = 5e9;
    double sweep_end_hz = 10e9;
    int cycles = 100;
    double prepare_ms = 10.0;
    double wait_ms = 2.2;
    double store_ms = 40.0;

    void validate() const;
};

struct MemoryChannelParams {
    double eta_system = 0.002;     // end-to-end recall probability
    double phase_error_rad = 0.0;  // phase between recalled early/late components
    double noise_floor = 0.0;      // white-noise admixture conditioned on detection

    void validate() const;
};

// T_s = 1 / Delta
double storage_time(double delta_hz);

// Tooth spacing produced by the two-tone chirp: Delta = alpha / delta,
// so that T_s = delta / alpha.
double comb_spacing_from_chirp(const ChirpParams& chirp);

// F = Delta / gamma
double finesse(const CombParams& comb);

// First forward recall: (d1/F)^2 e^{-d1/F} e^{-7/F^2} e^{-d0}
// (Gaussian-tooth dephasing factor; d1/F is the reversible optical depth).
double efficiency_forward(double d1, double finesse, double d0);

// Backward recall after the phase-matching operation:
// (1 - e^{-d1/F})^2 e^{-7/F^2}; approaches e^{-7/F^2} for deep combs.
double efficiency_backward(double d1, double finesse);

// Gaussian comb whose reversible optical depth (finesse times the
// spectrally averaged depth) equals d1, the convention the closed-form
// efficiency uses. The peak depth is d1 / sqrt(pi / (4 ln 2)).
CombParams gaussian_comb_with_reversible_depth(double d1, double finesse, double d0 = 0.0);

// Optical depth samples over the supplied detuning grid (Hz). The grid must
// span at least one period with at least 64 samples per period.
std::vector<double> comb_profile(const CombParams& comb, const std::vector<double>& grid_hz);

// Echo intensities from Fourier analysis of the comb's amplitude
// transmission e^{-d(delta)/2}.
//
// The transfer function is made causal by pairing the absorption with its
// dispersion phase (the analytic signal of the periodic depth profile), so
// all response lives at delays k/Delta with k >= 0 and Parseval holds over
// the reported orders: sum_k |a_k|^2 = <e^{-d}>. Order 0 is the transmitted
// fraction, order k the echo at time k/Delta.
//
// Raises NumericalError when the energy beyond max_orders exceeds
// tail_tolerance. Square teeth ring (their spectrum decays like 1/k), so
// they never converge at the default tolerance; pass a looser one to
// inspect their leading orders.
std::map<int, double> echo_efficiencies(const CombParams& comb, int max_orders = 64,
                                        double tail_tolerance = tol::echo_tail_energy);

// Echo table keyed by emission time k/Delta instead of order.
std::vector<std::pair<double, double>> echo_time_table(const CombParams& comb,
                                                       int max_orders = 64,
                                                       double tail_tolerance =
                                                           tol::echo_tail_energy);

// Stored-qubit channel: diag(1, e^{i phase}) on the 795 nm factor followed
// by mixing with I/4. Returns the output state and the recall probability.
std::pair<DensityMatrix4, double> apply_memory(const DensityMatrix4& rho,
                                               const MemoryChannelParams& mem);

} // namespace afcsim

#endif
