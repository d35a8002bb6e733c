#include <doctest.h>

#include <cmath>

#include "afcsim/metrics.hpp"
#include "afcsim/rng.hpp"
#include "afcsim/source_model.hpp"

using namespace afcsim;

namespace {

DensityMatrix4 werner(double v) {
    Matrix4 m = bell_phi_plus().matrix() * cplx(v, 0.0);
    for (std::size_t i = 0; i < 4; ++i) m(i, i) += (1.0 - v) * 0.25;
    return DensityMatrix4(m);
}

Matrix2 random_unitary(Rng& rng) {
    const double theta = rng.uniform(0.0, 6.283185307179586);
    const double alpha = rng.uniform(0.0, 6.283185307179586);
    const double beta = rng.uniform(0.0, 6.283185307179586);
    Matrix2 u;
    u(0, 0) = std::polar(std::cos(theta), alpha);
    u(0, 1) = std::polar(std::sin(theta), beta);
    u(1, 0) = -std::polar(std::sin(theta), -beta);
    u(1, 1) = std::polar(std::cos(theta), -alpha);
    return u;
}

DensityMatrix4 random_state(Rng& rng) {
    Matrix4 b;
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j) b(i, j) = cplx(rng.gaussian(), rng.gaussian());
    Matrix4 a = b.adjoint() * b;
    a *= cplx(1.0 / a.trace().real(), 0.0);
    Matrix4 sym = (a + a.adjoint()) * cplx(0.5, 0.0);
    return DensityMatrix4(sym);
}

const DensityMatrix4 kMixed(Matrix4::identity() * cplx(0.25, 0.0));

} // namespace

TEST_CASE("purity") {
    CHECK(purity(kMixed) == doctest::Approx(0.25));
    CHECK(purity(bell_phi_plus()) == doctest::Approx(1.0));
    Rng rng(3, "purity");
    for (int i = 0; i < 20; ++i) {
        const double p = purity(random_state(rng));
        CHECK(p >= 0.25 - 1e-12);
        CHECK(p <= 1.0 + 1e-12);
    }
}

TEST_CASE("spin flip") {
    const DensityMatrix4 phi = bell_phi_plus();
    CHECK((spin_flip(phi) - phi.matrix()).max_abs() < 1e-14);  // phi+ is invariant
    CHECK((spin_flip(kMixed) - kMixed.matrix()).max_abs() < 1e-14);

    Matrix4 ee;
    ee(0, 0) = 1.0;
    Matrix4 ll;
    ll(3, 3) = 1.0;
    CHECK((spin_flip(DensityMatrix4(ee)) - ll).max_abs() < 1e-14);
}

TEST_CASE("concurrence") {
    CHECK(concurrence(bell_phi_plus()) == doctest::Approx(1.0).epsilon(1e-9));
    Matrix4 ee;
    ee(0, 0) = 1.0;
    CHECK(concurrence(DensityMatrix4(ee)) == doctest::Approx(0.0));
    CHECK(concurrence(kMixed) == doctest::Approx(0.0));

    // Werner family oracle: C(V) = max(0, (3V - 1)/2).
    for (double v = 0.0; v <= 1.0; v += 0.05) {
        const double expected = std::max(0.0, (3.0 * v - 1.0) / 2.0);
        CHECK(concurrence(werner(v)) == doctest::Approx(expected).epsilon(1e-9));
    }
    CHECK(concurrence(werner(0.8)) == doctest::Approx(0.70).epsilon(1e-9));
}

TEST_CASE("concurrence is invariant under local unitaries") {
    Rng rng(77, "local-unitary");
    SourceParams p;
    p.p_deph = 0.08;
    p.p_white = 0.12;
    const DensityMatrix4 rho = source_state(p);
    const double base = concurrence(rho);
    for (int i = 0; i < 100; ++i) {
        const Matrix4 uv = tensor(random_unitary(rng), random_unitary(rng));
        Matrix4 rotated = uv * rho.matrix() * uv.adjoint();
        rotated = (rotated + rotated.adjoint()) * cplx(0.5, 0.0);
        CHECK(std::abs(concurrence(DensityMatrix4(rotated)) - base) < 1e-9);
    }
}

TEST_CASE("binary entropy") {
    CHECK(binary_entropy(0.5) == doctest::Approx(1.0));
    CHECK(binary_entropy(0.0) == 0.0);
    CHECK(binary_entropy(1.0) == 0.0);
    // Direct evaluation of -x lg x - (1-x) lg(1-x) at x = 0.8358.
    CHECK(binary_entropy(0.8358) == doctest::Approx(0.6442632725266643).epsilon(1e-12));
    CHECK(binary_entropy(0.3) == doctest::Approx(binary_entropy(0.7)).epsilon(1e-12));
    CHECK_THROWS_AS(binary_entropy(-0.1), ConfigError);
    CHECK_THROWS_AS(binary_entropy(1.1), ConfigError);
}

TEST_CASE("entanglement of formation") {
    CHECK(entanglement_of_formation(bell_phi_plus()) == doctest::Approx(1.0));
    Matrix4 ee;
    ee(0, 0) = 1.0;
    CHECK(entanglement_of_formation(DensityMatrix4(ee)) == doctest::Approx(0.0));

    // Monotone in concurrence along the Werner family.
    double prev = -1.0;
    for (double v = 0.34; v <= 1.0; v += 0.03) {
        const double e = entanglement_of_formation(werner(v));
        CHECK(e >= prev - 1e-12);
        prev = e;
    }
}

TEST_CASE("s_max") {
    CHECK(s_max(kMixed) == doctest::Approx(2.0));
    CHECK(s_max(bell_phi_plus()) == doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-12));
    Rng rng(11, "smax");
    for (int i = 0; i < 20; ++i) {
        const DensityMatrix4 rho = random_state(rng);
        const double c = concurrence(rho);
        CHECK(s_max(rho) == doctest::Approx(2.0 * std::sqrt(1.0 + c * c)).epsilon(1e-12));
        CHECK(s_max(rho) >= 2.0 - 1e-12);
        CHECK(s_max(rho) <= 2.0 * std::sqrt(2.0) + 1e-12);
    }
}

TEST_CASE("fidelity") {
    const DensityMatrix4 phi = bell_phi_plus();
    CHECK(fidelity(phi, kMixed) == doctest::Approx(0.25).epsilon(1e-10));
    CHECK(fidelity(phi, phi) == doctest::Approx(1.0).epsilon(1e-10));

    Rng rng(13, "fidelity");
    for (int i = 0; i < 15; ++i) {
        const DensityMatrix4 a = random_state(rng);
        const DensityMatrix4 b = random_state(rng);
        CHECK(fidelity(a, a) == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(fidelity(a, b) == doctest::Approx(fidelity(b, a)).epsilon(1e-9));
        CHECK(fidelity(a, b) >= 0.0);
        CHECK(fidelity(a, b) <= 1.0);
    }

    // Commuting diagonal states: F = (sum sqrt(p_i q_i))^2.
    Matrix4 pa, qa;
    const double ps[4] = {0.4, 0.3, 0.2, 0.1};
    const double qs[4] = {0.1, 0.2, 0.3, 0.4};
    double overlap = 0.0;
    for (std::size_t i = 0; i < 4; ++i) {
        pa(i, i) = ps[i];
        qa(i, i) = qs[i];
        overlap += std::sqrt(ps[i] * qs[i]);
    }
    CHECK(fidelity(DensityMatrix4(pa), DensityMatrix4(qa)) ==
          doctest::Approx(overlap * overlap).epsilon(1e-10));
}

TEST_CASE("metrics report") {
    const DensityMatrix4 phi = bell_phi_plus();
    const MetricsReport ideal = metrics_report(phi, phi);
    CHECK(ideal.purity == doctest::Approx(1.0));
    CHECK(ideal.concurrence == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(ideal.eof_normalized == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(ideal.s_max == doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-9));
    CHECK(ideal.fidelity_phi_plus == doctest::Approx(1.0).epsilon(1e-10));

    const MetricsReport mixed = metrics_report(kMixed, phi);
    CHECK(mixed.purity == doctest::Approx(0.25));
    CHECK(mixed.concurrence == doctest::Approx(0.0));
    CHECK(mixed.eof_normalized == doctest::Approx(0.0));
    CHECK(mixed.s_max == doctest::Approx(2.0));
    CHECK(mixed.fidelity_phi_plus == doctest::Approx(0.25).epsilon(1e-10));

    // Internal consistency: the reported s_max is derived from the reported
    // concurrence.
    Rng rng(19, "report");
    for (int i = 0; i < 10; ++i) {
        const MetricsReport r = metrics_report(random_state(rng), phi);
        CHECK(std::abs(r.s_max - 2.0 * std::sqrt(1.0 + r.concurrence * r.concurrence)) < 1e-12);
    }
}
