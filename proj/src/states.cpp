#include "afcsim/states.hpp"

namespace afcsim {

std::string format_setting(const MeasurementSetting& s) {
    std::string out(1, s.sign == Sign::plus ? '+' : '-');
    switch (s.axis) {
        case Axis::x: out += 'x'; break;
        case Axis::y: out += 'y'; break;
        case Axis::z: out += 'z'; break;
    }
    return out;
}

MeasurementSetting parse_setting(const std::string& text) {
    if (text.size() != 2)
        throw ParseError("bad setting '" + text + "', expected one of +x,-x,+y,-y,+z,-z");
    MeasurementSetting s;
    if (text[0] == '+')
        s.sign = Sign::plus;
    else if (text[0] == '-')
        s.sign = Sign::minus;
    else
        throw ParseError("bad setting sign in '" + text + "'");
    switch (text[1]) {
        case 'x': s.axis = Axis::x; break;
        case 'y': s.axis = Axis::y; break;
        case 'z': s.axis = Axis::z; break;
        default: throw ParseError("bad setting axis in '" + text + "'");
    }
    return s;
}

Matrix2 pauli(Axis axis) {
    Matrix2 m;
    switch (axis) {
        case Axis::x:
            m(0, 1) = 1.0;
            m(1, 0) = 1.0;
            break;
        case Axis::y:
            m(0, 1) = cplx(0.0, -1.0);
            m(1, 0) = cplx(0.0, 1.0);
            break;
        case Axis::z:
            m(0, 0) = 1.0;
            m(1, 1) = -1.0;
            break;
    }
    return m;
}

Matrix2 projector(const MeasurementSetting& setting) {
    const double s = setting.sign == Sign::plus ? 0.5 : -0.5;
    Matrix2 out = pauli(setting.axis) * cplx(s, 0.0);
    out(0, 0) += 0.5;
    out(1, 1) += 0.5;
    return out;
}

Matrix4 tensor(const Matrix2& a, const Matrix2& b) {
    Matrix4 out;
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j)
            for (std::size_t k = 0; k < 2; ++k)
                for (std::size_t l = 0; l < 2; ++l)
                    out(2 * i + k, 2 * j + l) = a(i, j) * b(k, l);
    return out;
}

DensityMatrix4::DensityMatrix4(const Matrix4& m) : mat_(m) {
    const double defect = m.hermiticity_defect();
    if (defect > tol::hermiticity)
        throw ConfigError("density matrix not Hermitian (defect " +
                          std::to_string(defect) + ")");
    const double tr = m.trace().real();
    if (std::abs(tr - 1.0) > tol::trace_one)
        throw ConfigError("density matrix trace " + std::to_string(tr) + " != 1");
    const EigResult<4> eig = hermitian_eig(m);
    if (eig.values[3] < tol::psd_floor)
        throw ConfigError("density matrix has negative eigenvalue " +
                          std::to_string(eig.values[3]));
}

double expectation(const DensityMatrix4& rho, const Matrix4& m) {
    if (!m.is_hermitian(tol::eig_hermitian_input * std::max(1.0, m.max_abs())))
        throw ConfigError("expectation: observable is not Hermitian");
    cplx t = 0.0;
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j) t += rho(i, j) * m(j, i);
    return t.real();
}

} // namespace afcsim
