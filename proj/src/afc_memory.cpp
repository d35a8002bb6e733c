#include "afcsim/afc_memory.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

namespace afcsim {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kFourLn2 = 2.772588722239781;  // 4 ln 2
// Area under one unit-peak gaussian tooth divided by its FWHM.
constexpr double kGaussianAreaFactor = 1.0644670194312262;  // sqrt(pi / (4 ln 2))

} // namespace

void CombParams::validate() const {
    if (delta_hz <= 0.0) throw ConfigError("comb: delta_hz must be > 0");
    if (gamma_hz <= 0.0) throw ConfigError("comb: gamma_hz must be > 0");
    if (delta_hz / gamma_hz < 1.0) throw ConfigError("comb: finesse delta/gamma must be >= 1");
    if (d1 < 0.0) throw ConfigError("comb: d1 must be >= 0");
    if (d0 < 0.0) throw ConfigError("comb: d0 must be >= 0");
    if (bandwidth_hz < delta_hz) throw ConfigError("comb: bandwidth_hz must be >= delta_hz");
}

void ChirpParams::validate() const {
    if (alpha_hz_per_s <= 0.0) throw ConfigError("chirp: alpha_hz_per_s must be > 0");
    if (delta_beat_hz <= 0.0) throw ConfigError("chirp: delta_beat_hz must be > 0");
    if (sweep_end_hz <= sweep_start_hz)
        throw ConfigError("chirp: sweep_end_hz must exceed sweep_start_hz");
    if (cycles < 1) throw ConfigError("chirp: cycles must be >= 1");
}

void MemoryChannelParams::validate() const {
    if (eta_system < 0.0 || eta_system > 1.0)
        throw ConfigError("memory: eta_system must lie in [0,1]");
    if (noise_floor < 0.0 || noise_floor > 1.0)
        throw ConfigError("memory: noise_floor must lie in [0,1]");
}

double storage_time(double delta_hz) {
    if (delta_hz <= 0.0) throw ConfigError("storage_time: delta_hz must be > 0");
    return 1.0 / delta_hz;
}

double comb_spacing_from_chirp(const ChirpParams& chirp) {
    chirp.validate();
    return chirp.alpha_hz_per_s / chirp.delta_beat_hz;
}

double finesse(const CombParams& comb) {
    comb.validate();
    return comb.delta_hz / comb.gamma_hz;
}

double efficiency_forward(double d1, double finesse, double d0) {
    if (d1 < 0.0 || finesse < 1.0 || d0 < 0.0)
        throw ConfigError("efficiency_forward: need d1 >= 0, F >= 1, d0 >= 0");
    const double x = d1 / finesse;
    return x * x * std::exp(-x) * std::exp(-7.0 / (finesse * finesse)) * std::exp(-d0);
}

double efficiency_backward(double d1, double finesse) {
    if (d1 < 0.0 || finesse < 1.0)
        throw ConfigError("efficiency_backward: need d1 >= 0, F >= 1");
    const double a = 1.0 - std::exp(-d1 / finesse);
    return a * a * std::exp(-7.0 / (finesse * finesse));
}

CombParams gaussian_comb_with_reversible_depth(double d1, double finesse, double d0) {
    CombParams comb;
    comb.tooth_shape = ToothShape::gaussian;
    comb.delta_hz = 142.857e6;
    comb.gamma_hz = comb.delta_hz / finesse;
    comb.bandwidth_hz = 5e9;
    comb.d1 = d1 / kGaussianAreaFactor;
    comb.d0 = d0;
    comb.validate();
    return comb;
}

namespace {

// Periodized optical depth at detuning x (one tooth centered on every
// multiple of Delta).
double depth_at(const CombParams& comb, double x) {
    const double delta = comb.delta_hz;
    const double m0 = std::round(x / delta);
    switch (comb.tooth_shape) {
        case ToothShape::sinusoidal:
            return comb.d0 + comb.d1 * 0.5 * (1.0 + std::cos(2.0 * kPi * x / delta));
        case ToothShape::gaussian: {
            double teeth = 0.0;
            for (int m = -6; m <= 6; ++m) {
                const double u = x - (m0 + m) * delta;
                teeth += std::exp(-kFourLn2 * u * u / (comb.gamma_hz * comb.gamma_hz));
            }
            return comb.d0 + comb.d1 * teeth;
        }
        case ToothShape::square: {
            const double u = std::abs(x - m0 * delta);
            return comb.d0 + (u <= comb.gamma_hz / 2.0 ? comb.d1 : 0.0);
        }
    }
    return comb.d0;
}

// In-place radix-2 decimation-in-time FFT (n must be a power of two).
void fft(std::vector<std::complex<double>>& a, bool inverse) {
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double angle = (inverse ? 2.0 : -2.0) * kPi / static_cast<double>(len);
        const std::complex<double> wl(std::cos(angle), std::sin(angle));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                const std::complex<double> u = a[i + k];
                const std::complex<double> v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wl;
            }
        }
    }
    if (inverse)
        for (auto& z : a) z /= static_cast<double>(n);
}

} // namespace

std::vector<double> comb_profile(const CombParams& comb, const std::vector<double>& grid_hz) {
    comb.validate();
    if (grid_hz.size() < 65) throw ConfigError("comb_profile: grid too small");
    const double span = grid_hz.back() - grid_hz.front();
    if (span < comb.delta_hz)
        throw ConfigError("comb_profile: grid must span at least one period");
    const double step = span / static_cast<double>(grid_hz.size() - 1);
    if (step > comb.delta_hz / 64.0)
        throw ConfigError("comb_profile: need at least 64 samples per period");
    std::vector<double> out(grid_hz.size());
    for (std::size_t i = 0; i < grid_hz.size(); ++i) out[i] = depth_at(comb, grid_hz[i]);
    return out;
}

std::map<int, double> echo_efficiencies(const CombParams& comb, int max_orders,
                                        double tail_tolerance) {
    comb.validate();
    if (max_orders < 1) throw ConfigError("echo_efficiencies: max_orders must be >= 1");
    constexpr std::size_t n = 16384;

    // Sample one period of the depth profile.
    std::vector<std::complex<double>> work(n);
    for (std::size_t j = 0; j < n; ++j)
        work[j] = depth_at(comb, comb.delta_hz * static_cast<double>(j) / n);
    std::vector<double> depth(n);
    for (std::size_t j = 0; j < n; ++j) depth[j] = work[j].real();

    // Analytic signal of the depth (zero out negative harmonics), giving
    // the absorption its causal dispersion phase.
    fft(work, false);
    for (auto& z : work) z /= static_cast<double>(n);
    work[0] = work[0];
    for (std::size_t k = 1; k < n / 2; ++k) work[k] *= 2.0;
    for (std::size_t k = n / 2 + 1; k < n; ++k) work[k] = 0.0;
    fft(work, true);
    for (auto& z : work) z *= static_cast<double>(n);  // undo inverse scaling
    for (auto& z : work) z = std::exp(-0.5 * z);       // amplitude transfer

    fft(work, false);
    for (auto& z : work) z /= static_cast<double>(n);

    double mean_transmission = 0.0;
    for (double d : depth) mean_transmission += std::exp(-d);
    mean_transmission /= static_cast<double>(n);

    std::map<int, double> orders;
    double captured = 0.0;
    for (int k = 0; k <= max_orders && k < static_cast<int>(n / 2); ++k) {
        const double e = std::norm(work[static_cast<std::size_t>(k)]);
        orders[k] = e;
        captured += e;
    }
    if (std::abs(mean_transmission - captured) > tail_tolerance)
        throw NumericalError("echo_efficiencies: truncated tail energy " +
                             std::to_string(mean_transmission - captured) + " exceeds " +
                             std::to_string(tail_tolerance));
    return orders;
}

std::vector<std::pair<double, double>> echo_time_table(const CombParams& comb, int max_orders,
                                                        double tail_tolerance) {
    const auto orders = echo_efficiencies(comb, max_orders, tail_tolerance);
    const double ts = storage_time(comb.delta_hz);
    std::vector<std::pair<double, double>> out;
    out.reserve(orders.size());
    for (const auto& [k, e] : orders) out.push_back({ts * k, e});
    return out;
}

std::pair<DensityMatrix4, double> apply_memory(const DensityMatrix4& rho,
                                               const MemoryChannelParams& mem) {
    mem.validate();
    Matrix2 u;
    u(0, 0) = 1.0;
    u(1, 1) = std::exp(cplx(0.0, mem.phase_error_rad));
    const Matrix4 u4 = tensor(u, Matrix2::identity());
    Matrix4 out = u4 * rho.matrix() * u4.adjoint();
    out *= cplx(1.0 - mem.noise_floor, 0.0);
    for (std::size_t i = 0; i < 4; ++i) out(i, i) += mem.noise_floor * 0.25;
    // Restore exact hermiticity lost to rounding in the unitary sandwich.
    Matrix4 sym = (out + out.adjoint()) * cplx(0.5, 0.0);
    return {DensityMatrix4(sym), mem.eta_system};
}

} // namespace afcsim
