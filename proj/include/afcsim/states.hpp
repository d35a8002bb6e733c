#ifndef AFCSIM_STATES_HPP
#define AFCSIM_STATES_HPP

#include <string>

#include "afcsim/matrix.hpp"

namespace afcsim {

enum class Axis { x, y, z };
enum class Sign { plus, minus };

// One analyzer setting: a Pauli axis with a sign, e.g. +x or -z.
struct MeasurementSetting {
    Axis axis = Axis::z;
    Sign sign = Sign::plus;

    MeasurementSetting opposite() const {
        return {axis, sign == Sign::plus ? Sign::minus : Sign::plus};
    }
    bool operator==(const MeasurementSetting& o) const {
        return axis == o.axis && sign == o.sign;
    }
    bool operator<(const MeasurementSetting& o) const {
        if (axis != o.axis) return static_cast<int>(axis) < static_cast<int>(o.axis);
        return static_cast<int>(sign) < static_cast<int>(o.sign);
    }
};

// "+x", "-z", ... used by every table format.
std::string format_setting(const MeasurementSetting& s);
MeasurementSetting parse_setting(const std::string& text);

// Fixed basis convention for the whole run: early <-> computational 0,
// late <-> computational 1. Tensor order is (795 nm qubit) x (1532 nm qubit).
struct TimeBinConvention {
    static constexpr int early = 0;
    static constexpr int late = 1;
    static const char* label(int index) { return index == early ? "e" : "l"; }
};

Matrix2 pauli(Axis axis);

// Pi = (I + sign * sigma_axis) / 2
Matrix2 projector(const MeasurementSetting& setting);

// Kronecker product, row-major, first factor = 795 nm qubit.
Matrix4 tensor(const Matrix2& a, const Matrix2& b);

// Validated two-qubit state: Hermitian, unit trace, positive semidefinite
// (tolerances in tolerances.hpp).
class DensityMatrix4 {
  public:
    explicit DensityMatrix4(const Matrix4& m);

    const Matrix4& matrix() const { return mat_; }
    const cplx& operator()(std::size_t i, std::size_t j) const { return mat_(i, j); }

  private:
    Matrix4 mat_;
};

// tr(rho * M) for Hermitian M; the result is real up to roundoff.
double expectation(const DensityMatrix4& rho, const Matrix4& m);

} // namespace afcsim

#endif
