#ifndef AFCSIM_TOLERANCES_HPP
#define AFCSIM_TOLERANCES_HPP

// Single source of truth for the numeric tolerances used by state
// validation and by the property tests.

namespace afcsim::tol {

// DensityMatrix4 admission.
inline constexpr double hermiticity = 1e-10;   // max |M - M^dag| elementwise
inline constexpr double trace_one = 1e-9;      // |tr(rho) - 1|
inline constexpr double psd_floor = -1e-9;     // smallest admissible eigenvalue

// Projector algebra.
inline constexpr double projector = 1e-12;     // Pi^2 = Pi, Pi+ + Pi- = I

// Eigensolver.
inline constexpr double eig_offdiag = 1e-12;   // off-diagonal Frobenius / ||H||
inline constexpr double eig_hermitian_input = 1e-8;
inline constexpr int eig_max_sweeps = 64;

// Matrix square root.
inline constexpr double sqrt_psd_reject = -1e-6;  // eigenvalue below this is an error
inline constexpr double sqrt_psd_residual = 1e-8; // ||R*R - H||_F bound

// Fourier echo analysis.
inline constexpr double echo_tail_energy = 1e-6;

} // namespace afcsim::tol

#endif
