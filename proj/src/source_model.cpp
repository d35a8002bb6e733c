#include "afcsim/source_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "afcsim/analyzer_sim.hpp"
#include "afcsim/tomography.hpp"

namespace afcsim {

void SourceParams::validate() const {
    if (p_deph < 0.0 || p_white < 0.0 || p_deph + p_white > 1.0 + 1e-12)
        throw ConfigError("source weights must satisfy p_deph, p_white >= 0 and "
                          "p_deph + p_white <= 1");
    if (rep_rate_hz < 0.0 || bin_separation_s < 0.0 || pair_rate_hz < 0.0)
        throw ConfigError("source rates must be >= 0");
}

DensityMatrix4 bell_phi_plus() {
    Matrix4 m;
    m(0, 0) = 0.5;
    m(0, 3) = 0.5;
    m(3, 0) = 0.5;
    m(3, 3) = 0.5;
    return DensityMatrix4(m);
}

DensityMatrix4 source_state(const SourceParams& params) {
    params.validate();
    const double bell = 1.0 - params.p_deph - params.p_white;
    Matrix4 m;
    m(0, 0) = bell * 0.5 + params.p_deph * 0.5 + params.p_white * 0.25;
    m(3, 3) = m(0, 0);
    m(0, 3) = bell * 0.5;
    m(3, 0) = bell * 0.5;
    m(1, 1) = params.p_white * 0.25;
    m(2, 2) = params.p_white * 0.25;
    return DensityMatrix4(m);
}

namespace {

// Model probability is linear in the weights:
//   P = 1/2 + c_b*(1 - pd - pw)/2 + c_d*pd/2
// with coefficients set by the joint setting (xx: +1/0, yy: -1/0,
// zz: +1/+1 etc., mixed axes 0/0).
struct LinearCoeffs {
    double bell = 0.0;
    double deph = 0.0;
};

LinearCoeffs model_coeffs(const MeasurementSetting& a, const MeasurementSetting& b) {
    if (a.axis != b.axis) return {};
    const double sign = (a.sign == b.sign) ? 1.0 : -1.0;
    switch (a.axis) {
        case Axis::x: return {sign, 0.0};
        case Axis::y: return {-sign, 0.0};
        case Axis::z: return {sign, sign};
    }
    return {};
}

double model_probability(const LinearCoeffs& c, double pd, double pw) {
    const double bell = 1.0 - pd - pw;
    return 0.5 + 0.5 * (c.bell * bell + c.deph * pd);
}

} // namespace

SourceParams fit_source_params(const MeasurementDataset& probabilities) {
    probabilities.validate();
    const auto wanted = table_settings();
    std::string missing;
    for (const auto& [a, b] : wanted) {
        if (!probabilities.find(a, b))
            missing += (missing.empty() ? "" : ", ") + format_setting(a) + ":" + format_setting(b);
    }
    if (!missing.empty())
        throw ConfigError("fit_source_params: dataset is missing settings " + missing);

    // Residual r_e = P_model - value is linear in (pd, pw); assemble the
    // weighted normal equations once.
    double h11 = 0.0, h12 = 0.0, h22 = 0.0, g1 = 0.0, g2 = 0.0, f0 = 0.0;
    for (const DatasetEntry& e : probabilities.entries) {
        const LinearCoeffs c = model_coeffs(e.setting_a, e.setting_b);
        const double w = e.sigma > 0.0 ? 1.0 / (e.sigma * e.sigma) : 1.0;
        const double r0 = model_probability(c, 0.0, 0.0) - e.value;
        const double dpd = 0.5 * (c.deph - c.bell);
        const double dpw = -0.5 * c.bell;
        h11 += w * dpd * dpd;
        h12 += w * dpd * dpw;
        h22 += w * dpw * dpw;
        g1 += w * r0 * dpd;
        g2 += w * r0 * dpw;
        f0 += w * r0 * r0;
    }
    auto objective = [&](double pd, double pw) {
        return f0 + 2.0 * (g1 * pd + g2 * pw) + h11 * pd * pd + 2.0 * h12 * pd * pw +
               h22 * pw * pw;
    };

    // The objective is a convex quadratic over the simplex; enumerate the
    // interior stationary point, the three edges and the vertices, keep the
    // best feasible candidate (first found wins ties).
    std::vector<std::pair<double, double>> candidates;
    const double det = h11 * h22 - h12 * h12;
    if (std::abs(det) > 1e-30)
        candidates.push_back({(-g1 * h22 + g2 * h12) / det, (-g2 * h11 + g1 * h12) / det});
    if (h22 > 1e-30) candidates.push_back({0.0, -g2 / h22});              // pd = 0 edge
    if (h11 > 1e-30) candidates.push_back({-g1 / h11, 0.0});              // pw = 0 edge
    {
        // pd + pw = 1 edge, parametrized by pd.
        const double a2 = h11 - 2.0 * h12 + h22;
        if (a2 > 1e-30) {
            const double pd = -(g1 - g2 + h12 - h22) / a2;
            candidates.push_back({pd, 1.0 - pd});
        }
    }
    candidates.push_back({0.0, 0.0});
    candidates.push_back({1.0, 0.0});
    candidates.push_back({0.0, 1.0});

    double best_f = std::numeric_limits<double>::infinity();
    double best_pd = 0.0, best_pw = 0.0;
    for (const auto& [pd, pw] : candidates) {
        if (pd < -1e-12 || pw < -1e-12 || pd + pw > 1.0 + 1e-12) continue;
        const double pdc = std::clamp(pd, 0.0, 1.0);
        const double pwc = std::clamp(pw, 0.0, 1.0 - pdc);
        const double f = objective(pdc, pwc);
        if (f < best_f - 1e-15) {
            best_f = f;
            best_pd = pdc;
            best_pw = pwc;
        }
    }

    SourceParams out;
    out.p_deph = best_pd;
    out.p_white = best_pw;
    return out;
}

} // namespace afcsim
