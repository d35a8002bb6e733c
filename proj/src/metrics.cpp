#include "afcsim/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "afcsim/source_model.hpp"

namespace afcsim {

double purity(const DensityMatrix4& rho) {
    const Matrix4& m = rho.matrix();
    return (m * m).trace().real();
}

Matrix4 spin_flip(const DensityMatrix4& rho) {
    const Matrix4 yy = tensor(pauli(Axis::y), pauli(Axis::y));
    return yy * rho.matrix().conjugate() * yy;
}

double concurrence(const DensityMatrix4& rho) {
    const Matrix4 root = sqrt_psd(rho.matrix());
    Matrix4 m = root * spin_flip(rho) * root;
    // The product is Hermitian PSD up to roundoff; symmetrize before
    // extracting the spin-flip spectrum.
    m = (m + m.adjoint()) * cplx(0.5, 0.0);
    const EigResult<4> eig = hermitian_eig(m);
    double lambda[4];
    for (int i = 0; i < 4; ++i) lambda[i] = std::sqrt(std::max(0.0, eig.values[i]));
    return std::max(0.0, lambda[0] - lambda[1] - lambda[2] - lambda[3]);
}

double binary_entropy(double x) {
    if (x < 0.0 || x > 1.0) throw ConfigError("binary_entropy: argument outside [0,1]");
    if (x == 0.0 || x == 1.0) return 0.0;
    return -x * std::log2(x) - (1.0 - x) * std::log2(1.0 - x);
}

namespace {

double eof_from_concurrence(double c) {
    const double arg = std::max(0.0, 1.0 - c * c);
    return binary_entropy(0.5 + 0.5 * std::sqrt(arg));
}

} // namespace

double entanglement_of_formation(const DensityMatrix4& rho) {
    return eof_from_concurrence(concurrence(rho));
}

double s_max(const DensityMatrix4& rho) {
    const double c = concurrence(rho);
    return 2.0 * std::sqrt(1.0 + c * c);
}

double fidelity(const DensityMatrix4& rho, const DensityMatrix4& sigma) {
    const Matrix4 root = sqrt_psd(rho.matrix());
    Matrix4 inner = root * sigma.matrix() * root;
    inner = (inner + inner.adjoint()) * cplx(0.5, 0.0);
    const double tr = sqrt_psd(inner).trace().real();
    return std::clamp(tr * tr, 0.0, 1.0);
}

MetricsReport metrics_report(const DensityMatrix4& rho, const DensityMatrix4& reference) {
    MetricsReport r;
    r.purity = purity(rho);
    r.concurrence = concurrence(rho);
    r.eof_normalized = eof_from_concurrence(r.concurrence);
    r.s_max = 2.0 * std::sqrt(1.0 + r.concurrence * r.concurrence);
    r.fidelity_phi_plus = fidelity(rho, reference);
    return r;
}

} // namespace afcsim
