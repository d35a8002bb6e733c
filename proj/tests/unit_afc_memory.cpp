#include <doctest.h>

#include <cmath>

#include "afcsim/afc_memory.hpp"
#include "afcsim/metrics.hpp"
#include "afcsim/rng.hpp"
#include "afcsim/source_model.hpp"

using namespace afcsim;

TEST_CASE("storage time") {
    CHECK(storage_time(142.857e6) == doctest::Approx(7.0e-9).epsilon(1e-5));
    CHECK(storage_time(1.0) == 1.0);
    CHECK(storage_time(200e6) == doctest::Approx(5.0e-9).epsilon(1e-12));
    CHECK_THROWS_AS(storage_time(0.0), ConfigError);
}

TEST_CASE("comb spacing from the two-tone chirp") {
    ChirpParams chirp;
    chirp.delta_beat_hz = 0.35e6;
    chirp.alpha_hz_per_s = 5.0e13;
    const double delta = comb_spacing_from_chirp(chirp);
    CHECK(delta == doctest::Approx(142.857142857e6).epsilon(1e-9));
    // For these values the round trip is exact in IEEE arithmetic.
    CHECK(storage_time(delta) == 7.0e-9);
    CHECK(storage_time(delta) == chirp.delta_beat_hz / chirp.alpha_hz_per_s);

    chirp.delta_beat_hz = 0.7e6;
    CHECK(comb_spacing_from_chirp(chirp) == doctest::Approx(71.4285714e6).epsilon(1e-8));

    chirp.delta_beat_hz = 1.0;
    chirp.alpha_hz_per_s = 1.0;
    CHECK(comb_spacing_from_chirp(chirp) == 1.0);

    chirp.delta_beat_hz = 0.0;
    CHECK_THROWS_AS(comb_spacing_from_chirp(chirp), ConfigError);
}

TEST_CASE("round trip T_s within one ulp for random chirps") {
    Rng rng(31, "chirp");
    for (int i = 0; i < 200; ++i) {
        ChirpParams chirp;
        chirp.delta_beat_hz = rng.uniform(0.05e6, 2e6);
        chirp.alpha_hz_per_s = rng.uniform(1e12, 1e14);
        const double direct = chirp.delta_beat_hz / chirp.alpha_hz_per_s;
        const double via_spacing = storage_time(comb_spacing_from_chirp(chirp));
        CHECK(std::abs(via_spacing - direct) <=
              std::nextafter(direct, INFINITY) - direct);  // <= 1 ulp
    }
}

TEST_CASE("finesse") {
    CombParams comb;
    comb.delta_hz = 143e6;
    comb.gamma_hz = 75e6;
    CHECK(finesse(comb) == doctest::Approx(1.9067).epsilon(1e-4));
    comb.gamma_hz = 143e6;
    CHECK(finesse(comb) == doctest::Approx(1.0));
    comb.gamma_hz = 14.3e6;
    CHECK(finesse(comb) == doctest::Approx(10.0));
}

TEST_CASE("forward recall efficiency") {
    CHECK(efficiency_forward(0.0, 2.0, 0.0) == 0.0);
    // Direct evaluation of 4 e^{-2} e^{-7/4}.
    CHECK(efficiency_forward(4.0, 2.0, 0.0) ==
          doctest::Approx(4.0 * std::exp(-2.0) * std::exp(-1.75)).epsilon(1e-14));
    CHECK(efficiency_forward(4.0, 2.0, 0.0) == doctest::Approx(0.0941).epsilon(1e-3));

    // e^{-d0} factor halves the efficiency at d0 = ln 2.
    for (double d1 : {0.5, 2.0, 5.0})
        CHECK(efficiency_forward(d1, 2.0, std::log(2.0)) ==
              doctest::Approx(0.5 * efficiency_forward(d1, 2.0, 0.0)).epsilon(1e-13));

    CHECK_THROWS_AS(efficiency_forward(-1.0, 2.0, 0.0), ConfigError);
    CHECK_THROWS_AS(efficiency_forward(1.0, 0.5, 0.0), ConfigError);

    // The analytic optimum sits at d1 = 2F.
    const double f = 2.0;
    const double peak = efficiency_forward(2.0 * f, f, 0.0);
    for (double d1 = 0.1; d1 < 10.0; d1 += 0.1)
        CHECK(efficiency_forward(d1, f, 0.0) <= peak + 1e-12);
}

TEST_CASE("backward recall efficiency") {
    CHECK(efficiency_backward(0.0, 2.0) == 0.0);
    CHECK(efficiency_backward(1e3, 2.0) == doctest::Approx(std::exp(-1.75)).epsilon(1e-12));
    CHECK(efficiency_backward(4.0, 2.0) == doctest::Approx(0.1299212325349366).epsilon(1e-12));
    double prev = -1.0;
    for (double d1 = 0.0; d1 < 20.0; d1 += 0.5) {
        const double e = efficiency_backward(d1, 2.0);
        CHECK(e >= prev);
        prev = e;
    }
}

TEST_CASE("comb profile shapes") {
    CombParams comb;
    comb.delta_hz = 100e6;
    comb.gamma_hz = 50e6;
    comb.d1 = 3.0;
    comb.d0 = 0.25;
    comb.tooth_shape = ToothShape::sinusoidal;

    std::vector<double> grid;
    for (int i = 0; i <= 4096; ++i) grid.push_back(-200e6 + 400e6 * i / 4096.0);
    const std::vector<double> depth = comb_profile(comb, grid);

    // Peak at zero detuning, trough at half spacing.
    const auto at = [&](double hz) {
        std::size_t best = 0;
        for (std::size_t i = 0; i < grid.size(); ++i)
            if (std::abs(grid[i] - hz) < std::abs(grid[best] - hz)) best = i;
        return depth[best];
    };
    CHECK(at(0.0) == doctest::Approx(comb.d0 + comb.d1).epsilon(1e-6));
    CHECK(at(50e6) == doctest::Approx(comb.d0).epsilon(1e-4));
    for (double d : depth) CHECK(d >= comb.d0 - 1e-12);

    // FWHM of a finesse-2 gaussian comb measured from the samples.
    CombParams g = gaussian_comb_with_reversible_depth(2.0, 2.0);
    grid.clear();
    for (int i = 0; i <= 1 << 15; ++i)
        grid.push_back(-g.delta_hz + 2.0 * g.delta_hz * i / double(1 << 15));
    const std::vector<double> gd = comb_profile(g, grid);
    double peak = 0.0;
    for (double v : gd) peak = std::max(v, peak);
    double left = 0.0, right = 0.0;
    for (std::size_t i = 1; i < gd.size(); ++i) {
        if (gd[i - 1] < peak / 2.0 && gd[i] >= peak / 2.0 && grid[i] < 0.0) left = grid[i];
        if (gd[i - 1] >= peak / 2.0 && gd[i] < peak / 2.0 && grid[i] > 0.0) right = grid[i];
    }
    const double fwhm = right - left;
    CHECK(g.delta_hz / fwhm == doctest::Approx(2.0).epsilon(0.02));

    CHECK_THROWS_AS(comb_profile(comb, std::vector<double>{0.0, 1.0, 2.0}), ConfigError);
}

TEST_CASE("echo orders of a flat line") {
    CombParams comb;
    comb.delta_hz = 100e6;
    comb.gamma_hz = 50e6;
    comb.d1 = 0.0;
    comb.d0 = 0.7;
    for (ToothShape shape : {ToothShape::sinusoidal, ToothShape::gaussian, ToothShape::square}) {
        comb.tooth_shape = shape;
        const auto orders = echo_efficiencies(comb, 8);
        CHECK(orders.at(0) == doctest::Approx(std::exp(-0.7)).epsilon(1e-12));
        for (const auto& [k, e] : orders)
            if (k > 0) CHECK(e < 1e-15);
    }
}

TEST_CASE("sinusoidal comb echo orders match the closed-form series") {
    // With the causal transfer function the sine comb gives
    //   a_k = e^{-d0/2 - d1/4} (-d1/4)^k / k!
    // and Parseval ties the total to the modified Bessel function:
    //   sum_k |a_k|^2 = e^{-d0 - d1/2} I_0(d1/2).
    CombParams comb;
    comb.delta_hz = 142.857e6;
    comb.gamma_hz = 71.4e6;
    comb.tooth_shape = ToothShape::sinusoidal;
    for (double d1 : {0.5, 2.0, 4.0}) {
        comb.d1 = d1;
        comb.d0 = 0.2;
        const auto orders = echo_efficiencies(comb, 32);
        double factorial = 1.0;
        for (int k = 0; k <= 8; ++k) {
            if (k > 0) factorial *= k;
            const double amp = std::exp(-comb.d0 / 2.0 - d1 / 4.0) *
                               std::pow(d1 / 4.0, k) / factorial;
            CHECK(orders.at(k) == doctest::Approx(amp * amp).epsilon(1e-6));
        }
        double total = 0.0;
        for (const auto& [k, e] : orders) total += e;
        const double bessel = std::exp(-comb.d0 - d1 / 2.0) * std::cyl_bessel_i(0.0, d1 / 2.0);
        CHECK(total == doctest::Approx(bessel).epsilon(1e-9));
    }
}

TEST_CASE("gaussian comb first echo against the closed form") {
    // Spec-level point check at F=2, d1(peak)=4.
    CombParams comb;
    comb.delta_hz = 142.857e6;
    comb.gamma_hz = comb.delta_hz / 2.0;
    comb.tooth_shape = ToothShape::gaussian;
    comb.d1 = 4.0;
    comb.d0 = 0.0;
    const auto orders = echo_efficiencies(comb, 32);
    const double closed = efficiency_forward(4.0, 2.0, 0.0);
    CHECK(std::abs(orders.at(1) - closed) / closed < 0.05);
}

TEST_CASE("square teeth outperform gaussian teeth at fixed reversible depth") {
    const double f = 2.0, d1 = 4.0;
    CombParams gaussian = gaussian_comb_with_reversible_depth(d1, f);
    CombParams square = gaussian;
    square.tooth_shape = ToothShape::square;
    square.d1 = d1;  // duty-1/F square teeth at peak d1 average to exactly d1/F
    const auto eg = echo_efficiencies(gaussian, 48);
    // Square teeth ring: their series never meets the default tail bound.
    CHECK_THROWS_AS(echo_efficiencies(square, 48), NumericalError);
    const auto es = echo_efficiencies(square, 48, 0.05);
    CHECK(es.at(1) >= eg.at(1));
}

TEST_CASE("echo energy conservation") {
    CombParams comb = gaussian_comb_with_reversible_depth(3.0, 3.0, 0.1);
    const auto orders = echo_efficiencies(comb, 64);
    double total = 0.0;
    for (const auto& [k, e] : orders) {
        CHECK(e >= 0.0);
        total += e;
    }
    CHECK(total <= 1.0 + 1e-12);

    const auto table = echo_time_table(comb, 8);
    CHECK(table[1].first == doctest::Approx(storage_time(comb.delta_hz)).epsilon(1e-12));
}

TEST_CASE("memory channel") {
    const DensityMatrix4 phi = bell_phi_plus();

    MemoryChannelParams ident;
    ident.eta_system = 0.002;
    const auto [same, recall] = apply_memory(phi, ident);
    CHECK(recall == 0.002);
    CHECK((same.matrix() - phi.matrix()).max_abs() < 1e-14);

    MemoryChannelParams flip;
    flip.phase_error_rad = 3.14159265358979323846;
    const auto [minus, r2] = apply_memory(phi, flip);
    (void)r2;
    CHECK(minus(0, 3).real() == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(fidelity(phi, minus) < 1e-12);

    // Any pure phase error is a local unitary: concurrence is preserved.
    Rng rng(17, "memory");
    SourceParams noisy;
    noisy.p_deph = 0.1;
    noisy.p_white = 0.15;
    const DensityMatrix4 rho = source_state(noisy);
    for (int i = 0; i < 10; ++i) {
        MemoryChannelParams mem;
        mem.phase_error_rad = rng.uniform(0.0, 6.28);
        const auto [out, r3] = apply_memory(rho, mem);
        (void)r3;
        CHECK(concurrence(out) == doctest::Approx(concurrence(rho)).epsilon(1e-9));
        CHECK(out.matrix().trace().real() == doctest::Approx(1.0).epsilon(1e-12));
    }

    // Noise floor mixes toward I/4 but keeps a valid state.
    MemoryChannelParams fog;
    fog.noise_floor = 0.3;
    const auto [mixed, r4] = apply_memory(phi, fog);
    (void)r4;
    CHECK(purity(mixed) < purity(phi));
}
