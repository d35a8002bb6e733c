#ifndef AFCSIM_METRICS_HPP
#define AFCSIM_METRICS_HPP

#include "afcsim/states.hpp"

namespace afcsim {

struct MetricsReport {
    double purity = 0.0;
    double concurrence = 0.0;
    double eof_normalized = 0.0;  // normalization by E_F(|phi+>) = 1 is the identity
    double s_max = 0.0;
    double fidelity_phi_plus = 0.0;
};

// tr(rho^2)
double purity(const DensityMatrix4& rho);

// (sigma_y x sigma_y) rho^* (sigma_y x sigma_y), conjugation in the
// computational basis.
Matrix4 spin_flip(const DensityMatrix4& rho);

// Wootters concurrence via the Hermitian route: the lambda_i are the
// eigenvalues of sqrt( sqrt(rho) rho_tilde sqrt(rho) ), sorted descending.
double concurrence(const DensityMatrix4& rho);

// H(x) = -x log2 x - (1-x) log2(1-x), with 0 log 0 = 0.
double binary_entropy(double x);

// E_F = H(1/2 + sqrt(1 - C^2)/2)
double entanglement_of_formation(const DensityMatrix4& rho);

// Largest attainable CHSH parameter, 2 sqrt(1 + C^2).
double s_max(const DensityMatrix4& rho);

// Uhlmann fidelity (tr sqrt( sqrt(rho) sigma sqrt(rho) ))^2.
double fidelity(const DensityMatrix4& rho, const DensityMatrix4& sigma);

// All of the above against a reference state (fidelity slot); s_max is
// recomputed from the reported concurrence so the identity holds exactly.
MetricsReport metrics_report(const DensityMatrix4& rho, const DensityMatrix4& reference);

} // namespace afcsim

#endif
