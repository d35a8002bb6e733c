#include "afcsim/tomography.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "afcsim/metrics.hpp"
#include "afcsim/optimize.hpp"
#include "afcsim/rng.hpp"
#include "afcsim/source_model.hpp"

namespace afcsim {

namespace {

// Weight floor for entries quoted with sigma = 0 (degenerate but legal in
// resampling tests).
constexpr double kSigmaFloor = 1e-6;

} // namespace

void MeasurementDataset::validate() const {
    if (entries.empty()) throw ConfigError("dataset is empty");
    std::set<std::pair<MeasurementSetting, MeasurementSetting>> seen;
    for (const DatasetEntry& e : entries) {
        if (!seen.insert({e.setting_a, e.setting_b}).second)
            throw ConfigError("dataset has duplicate setting pair " +
                              format_setting(e.setting_a) + ":" + format_setting(e.setting_b));
        if (e.value < -1e-12 || e.value > 1.0 + 1e-12)
            throw ConfigError("dataset probability outside [0,1]");
        if (e.sigma < 0.0) throw ConfigError("dataset sigma must be >= 0");
    }
}

bool MeasurementDataset::from_counts() const {
    for (const DatasetEntry& e : entries)
        if (!e.has_counts()) return false;
    return !entries.empty();
}

const DatasetEntry* MeasurementDataset::find(const MeasurementSetting& a,
                                             const MeasurementSetting& b) const {
    for (const DatasetEntry& e : entries)
        if (e.setting_a == a && e.setting_b == b) return &e;
    return nullptr;
}

namespace {

DatasetEntry entry_from_pair(const MeasurementSetting& a, const MeasurementSetting& b,
                             double c_this, double c_opp) {
    const double total = c_this + c_opp;
    if (total <= 0.0)
        throw ConfigError("dataset_from_counts: zero total counts for " + format_setting(a) +
                          ":" + format_setting(b));
    DatasetEntry e;
    e.setting_a = a;
    e.setting_b = b;
    e.value = c_this / total;
    e.sigma = std::max(std::sqrt(e.value * (1.0 - e.value) / total), 0.5 / total);
    e.counts = c_this;
    e.counts_opposite = c_opp;
    return e;
}

} // namespace

MeasurementDataset dataset_from_counts(const std::vector<CoincidenceRecord>& records) {
    MeasurementDataset out;
    auto find_record = [&](const MeasurementSetting& a,
                           const MeasurementSetting& b) -> const CoincidenceRecord* {
        for (const CoincidenceRecord& r : records)
            if (r.setting_a == a && r.setting_b == b) return &r;
        return nullptr;
    };
    std::string missing;
    for (const CoincidenceRecord& r : records) {
        const CoincidenceRecord* partner = find_record(r.setting_a, r.setting_b.opposite());
        if (!partner) {
            missing += (missing.empty() ? "" : ", ") + format_setting(r.setting_a) + ":" +
                       format_setting(r.setting_b.opposite());
            continue;
        }
        out.entries.push_back(entry_from_pair(r.setting_a, r.setting_b,
                                              static_cast<double>(r.counts),
                                              static_cast<double>(partner->counts)));
    }
    if (!missing.empty())
        throw ConfigError("dataset_from_counts: missing partner settings " + missing);
    out.validate();
    return out;
}

MeasurementDataset exact_probabilities(
    const DensityMatrix4& rho,
    const std::vector<std::pair<MeasurementSetting, MeasurementSetting>>& settings,
    double sigma) {
    MeasurementDataset out;
    for (const auto& [a, b] : settings) {
        DatasetEntry e;
        e.setting_a = a;
        e.setting_b = b;
        e.value = joint_probability(rho, a, b);
        e.sigma = sigma;
        out.entries.push_back(e);
    }
    out.validate();
    return out;
}

namespace {

// Lower-triangular layout of the 16 parameters.
Matrix4 build_t(const std::array<double, 16>& th) {
    Matrix4 t;
    t(0, 0) = th[0];
    t(1, 1) = th[1];
    t(2, 2) = th[2];
    t(3, 3) = th[3];
    t(1, 0) = cplx(th[4], th[5]);
    t(2, 0) = cplx(th[6], th[7]);
    t(2, 1) = cplx(th[8], th[9]);
    t(3, 0) = cplx(th[10], th[11]);
    t(3, 1) = cplx(th[12], th[13]);
    t(3, 2) = cplx(th[14], th[15]);
    return t;
}

struct ThetaSlot {
    std::size_t i, j;
    bool imag;
};

constexpr std::array<ThetaSlot, 16> kSlots{{
    {0, 0, false}, {1, 1, false}, {2, 2, false}, {3, 3, false},
    {1, 0, false}, {1, 0, true},
    {2, 0, false}, {2, 0, true}, {2, 1, false}, {2, 1, true},
    {3, 0, false}, {3, 0, true}, {3, 1, false}, {3, 1, true}, {3, 2, false}, {3, 2, true},
}};

Matrix4 rho_from_theta_unchecked(const std::array<double, 16>& th, double* trace_out = nullptr) {
    const Matrix4 t = build_t(th);
    Matrix4 a = t.adjoint() * t;
    const double tr = a.trace().real();
    if (trace_out) *trace_out = tr;
    if (tr < 1e-280) throw ConfigError("physical_parametrization: theta is (near) zero");
    a *= cplx(1.0 / tr, 0.0);
    return a;
}

// Precompiled dataset entry for the objective.
struct CompiledEntry {
    Matrix4 proj_plus;   // Pi_a x Pi_{+b}
    Matrix4 proj_minus;  // Pi_a x Pi_{-b}
    double value = 0.0;
    double weight = 0.0;
    double sign = 1.0;    // +1 for +b entries, -1 for -b
    double offset = 0.0;  // 0 for +b entries, 1 for -b
};

std::vector<CompiledEntry> compile_entries(const MeasurementDataset& ds) {
    std::vector<CompiledEntry> out;
    out.reserve(ds.entries.size());
    for (const DatasetEntry& e : ds.entries) {
        CompiledEntry c;
        const MeasurementSetting b_plus{e.setting_b.axis, Sign::plus};
        c.proj_plus = tensor(projector(e.setting_a), projector(b_plus));
        c.proj_minus = tensor(projector(e.setting_a), projector(b_plus.opposite()));
        c.value = e.value;
        const double sigma = std::max(e.sigma, kSigmaFloor);
        c.weight = 1.0 / (sigma * sigma);
        if (e.setting_b.sign == Sign::plus) {
            c.sign = 1.0;
            c.offset = 0.0;
        } else {
            c.sign = -1.0;
            c.offset = 1.0;
        }
        out.push_back(c);
    }
    return out;
}

double real_trace_product(const Matrix4& a, const Matrix4& b) {
    cplx t = 0.0;
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j) t += a(i, j) * b(j, i);
    return t.real();
}

// Weighted-least-squares objective with analytic gradient in theta.
class MleObjective {
  public:
    explicit MleObjective(const MeasurementDataset& ds) : entries_(compile_entries(ds)) {}

    double operator()(const std::vector<double>& x, std::vector<double>* grad) const {
        std::array<double, 16> th{};
        std::copy(x.begin(), x.end(), th.begin());
        double trace = 0.0;
        Matrix4 rho;
        try {
            rho = rho_from_theta_unchecked(th, &trace);
        } catch (const ConfigError&) {
            if (grad) std::fill(grad->begin(), grad->end(), 0.0);
            return std::numeric_limits<double>::infinity();
        }

        double f = 0.0;
        Matrix4 g_rho;  // df/dA accumulated as sum c_e (m N - n M), scaled later
        for (const CompiledEntry& e : entries_) {
            const double n = real_trace_product(rho, e.proj_plus);
            const double m = real_trace_product(rho, e.proj_minus);
            const double denom = n + m;
            if (denom < 1e-300) {
                if (grad) std::fill(grad->begin(), grad->end(), 0.0);
                return std::numeric_limits<double>::infinity();
            }
            const double p_plus = n / denom;
            const double p = e.offset + e.sign * p_plus;
            const double r = p - e.value;
            f += e.weight * r * r;
            if (grad) {
                const double c = 2.0 * e.weight * r * e.sign / (denom * denom);
                g_rho += e.proj_plus * cplx(c * m, 0.0);
                g_rho -= e.proj_minus * cplx(c * n, 0.0);
            }
        }
        if (grad) {
            const Matrix4 tg = build_t(th) * g_rho;
            grad->resize(16);
            for (std::size_t k = 0; k < 16; ++k) {
                const cplx v = tg(kSlots[k].i, kSlots[k].j);
                (*grad)[k] = (kSlots[k].imag ? 2.0 * v.imag() : 2.0 * v.real()) / trace;
            }
        }
        return f;
    }

    std::vector<double> residuals(const Matrix4& rho) const {
        std::vector<double> out;
        out.reserve(entries_.size());
        for (const CompiledEntry& e : entries_) {
            const double n = real_trace_product(rho, e.proj_plus);
            const double m = real_trace_product(rho, e.proj_minus);
            const double p = e.offset + e.sign * (n / (n + m));
            out.push_back(p - e.value);
        }
        return out;
    }

  private:
    std::vector<CompiledEntry> entries_;
};

// Complex Cholesky, rho = L L^dag with L lower triangular.
Matrix4 cholesky_lower(const Matrix4& rho, double ridge) {
    Matrix4 a = rho;
    for (std::size_t i = 0; i < 4; ++i) a(i, i) += ridge;
    Matrix4 l;
    for (std::size_t i = 0; i < 4; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            cplx sum = a(i, j);
            for (std::size_t k = 0; k < j; ++k) sum -= l(i, k) * std::conj(l(j, k));
            if (i == j) {
                const double d = sum.real();
                if (d <= 0.0) throw NumericalError("cholesky: matrix not positive definite");
                l(i, j) = std::sqrt(d);
            } else {
                l(i, j) = sum / l(j, j);
            }
        }
    }
    return l;
}

// theta such that physical_parametrization(theta) reproduces rho (up to the
// ridge): rho = U U^dag with U upper from the reversed Cholesky, and
// T = U^dag is the lower factor with T^dag T = rho.
std::array<double, 16> theta_from_state(const Matrix4& rho) {
    Matrix4 reversed;
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j) reversed(i, j) = rho(3 - i, 3 - j);
    const Matrix4 l = cholesky_lower(reversed, 1e-10);
    Matrix4 t;  // t = (J l J)^dag
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j) t(i, j) = std::conj(l(3 - j, 3 - i));
    std::array<double, 16> th{};
    for (std::size_t k = 0; k < 16; ++k) {
        const cplx v = t(kSlots[k].i, kSlots[k].j);
        th[k] = kSlots[k].imag ? v.imag() : v.real();
    }
    return th;
}

int axis_index(Axis a) { return a == Axis::x ? 0 : (a == Axis::y ? 1 : 2); }

// Linear inversion of the ratio equations:
//   (2P - 1)(1 + s_a m_A) = s_b n_B + s_a s_b E_AB
// over the 15 Pauli coefficients (m_A, n_B, E_AB), solved as a ridge
// least-squares problem. Missing directions (the data determines only 12
// independent combinations for the published 16-setting layout) stay at
// zero, which is the minimum-norm completion.
Matrix4 linear_inversion(const MeasurementDataset& ds) {
    constexpr int kDim = 15;
    std::vector<double> ata(kDim * kDim, 0.0), atb(kDim, 0.0);
    for (const DatasetEntry& e : ds.entries) {
        double row[kDim] = {0.0};
        const double u = 2.0 * e.value - 1.0;
        const double sa = e.setting_a.sign == Sign::plus ? 1.0 : -1.0;
        const double sb = e.setting_b.sign == Sign::plus ? 1.0 : -1.0;
        const int ia = axis_index(e.setting_a.axis);
        const int ib = axis_index(e.setting_b.axis);
        row[ia] = u * sa;                      // m_A
        row[3 + ib] -= sb;                     // n_B
        row[6 + 3 * ia + ib] -= sa * sb;       // E_AB
        const double rhs = -u;
        const double sigma = std::max(e.sigma, kSigmaFloor);
        const double w = 1.0 / (sigma * sigma);
        for (int i = 0; i < kDim; ++i) {
            atb[i] += w * row[i] * rhs;
            for (int j = 0; j < kDim; ++j) ata[i * kDim + j] += w * row[i] * row[j];
        }
    }
    const std::vector<double> sol = solve_symmetric(ata, atb, 1e-9);

    Matrix4 rho = Matrix4::identity() * cplx(0.25, 0.0);
    const Axis axes[3] = {Axis::x, Axis::y, Axis::z};
    for (int i = 0; i < 3; ++i) {
        rho += tensor(pauli(axes[i]), Matrix2::identity()) * cplx(0.25 * sol[i], 0.0);
        rho += tensor(Matrix2::identity(), pauli(axes[i])) * cplx(0.25 * sol[3 + i], 0.0);
        for (int j = 0; j < 3; ++j)
            rho += tensor(pauli(axes[i]), pauli(axes[j])) *
                   cplx(0.25 * sol[6 + 3 * i + j], 0.0);
    }

    // Project onto the physical set: clamp the spectrum, renormalize.
    const EigResult<4> eig = hermitian_eig(rho);
    double total = 0.0;
    double lambda[4];
    for (int i = 0; i < 4; ++i) {
        lambda[i] = std::max(eig.values[i], 1e-6);
        total += lambda[i];
    }
    Matrix4 out;
    for (int e = 0; e < 4; ++e)
        for (std::size_t i = 0; i < 4; ++i)
            for (std::size_t j = 0; j < 4; ++j)
                out(i, j) += eig.vectors(i, e) * std::conj(eig.vectors(j, e)) *
                             cplx(lambda[e] / total, 0.0);
    return out;
}

// Condition number of the objective Hessian at the optimum, restricted to
// the subspace orthogonal to the scale-gauge direction theta.
double hessian_condition_at(const MleObjective& objective, const std::array<double, 16>& th) {
    constexpr int n = 16;
    std::vector<double> x(th.begin(), th.end());
    std::vector<double> hess(n * n, 0.0);
    std::vector<double> gp(n), gm(n);
    for (int j = 0; j < n; ++j) {
        const double h = 1e-5 * std::max(1.0, std::abs(x[j]));
        std::vector<double> xp = x, xm = x;
        xp[j] += h;
        xm[j] -= h;
        objective(xp, &gp);
        objective(xm, &gm);
        for (int i = 0; i < n; ++i) hess[i * n + j] = (gp[i] - gm[i]) / (2.0 * h);
    }
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const double s = 0.5 * (hess[i * n + j] + hess[j * n + i]);
            hess[i * n + j] = s;
            hess[j * n + i] = s;
        }

    // Householder basis with first column along theta.
    double nrm = 0.0;
    for (double v : x) nrm += v * v;
    nrm = std::sqrt(nrm);
    std::vector<double> u(n, 0.0);
    for (int i = 0; i < n; ++i) u[i] = x[i] / nrm;
    u[0] -= 1.0;
    double uu = 0.0;
    for (double v : u) uu += v * v;

    auto basis_col = [&](int c, std::vector<double>& col) {
        // column c+1 of the reflector I - 2 u u^T / (u.u)
        for (int i = 0; i < n; ++i) col[i] = (i == c + 1 ? 1.0 : 0.0);
        if (uu > 1e-24) {
            const double proj = 2.0 * u[c + 1] / uu;
            for (int i = 0; i < n; ++i) col[i] -= proj * u[i];
        }
    };

    SquareMatrix<15> reduced;
    std::vector<double> bi(n), bj(n), hbj(n);
    for (int j = 0; j < 15; ++j) {
        basis_col(j, bj);
        for (int r = 0; r < n; ++r) {
            double s = 0.0;
            for (int c = 0; c < n; ++c) s += hess[r * n + c] * bj[c];
            hbj[r] = s;
        }
        for (int i = 0; i < 15; ++i) {
            basis_col(i, bi);
            double s = 0.0;
            for (int r = 0; r < n; ++r) s += bi[r] * hbj[r];
            reduced(i, j) = s;
        }
    }
    SquareMatrix<15> sym = (reduced + reduced.adjoint()) * cplx(0.5, 0.0);
    const EigResult<15> eig = hermitian_eig(sym);
    const double top = std::abs(eig.values[0]);
    double bottom = std::abs(eig.values[14]);
    if (bottom < top * 1e-300) bottom = top * 1e-300;
    if (top == 0.0) return 0.0;
    return top / bottom;
}

} // namespace

Matrix4 physical_parametrization(const std::array<double, 16>& theta) {
    return rho_from_theta_unchecked(theta);
}

TomographyResult mle_reconstruct(const MeasurementDataset& dataset,
                                 const TomographyOptions& options) {
    dataset.validate();
    const MleObjective objective(dataset);
    ObjectiveFn fn = [&objective](const std::vector<double>& x, std::vector<double>* g) {
        return objective(x, g);
    };

    std::vector<std::array<double, 16>> starts;
    if (options.warm_start) starts.push_back(*options.warm_start);
    starts.push_back(theta_from_state(linear_inversion(dataset)));
    Rng rng(options.seed, "mle/starts");
    for (int s = 0; s < options.random_starts; ++s) {
        std::array<double, 16> th{};
        for (double& v : th) v = rng.gaussian();
        starts.push_back(th);
    }

    BfgsOptions bfgs;
    bfgs.max_iterations = options.max_iterations;
    bfgs.gradient_tol = options.gradient_tol;
    bfgs.step_tol = options.step_tol;

    std::vector<double> start_objectives;
    start_objectives.reserve(starts.size());
    BfgsResult best;
    best.fx = std::numeric_limits<double>::infinity();
    for (const auto& th : starts) {
        BfgsResult r = bfgs_minimize(fn, std::vector<double>(th.begin(), th.end()), bfgs);
        start_objectives.push_back(r.fx);
        // Lowest objective wins; ties keep the earliest start. The tie
        // window matters when the data is exactly fittable: every start in
        // the zero-residual valley reaches ~0 and the linear-inversion
        // start (the minimum-norm completion) must not lose to roundoff.
        if (best.x.empty() || r.fx < best.fx - (1e-12 + 1e-9 * std::abs(best.fx)))
            best = std::move(r);
    }

    std::array<double, 16> th{};
    std::copy(best.x.begin(), best.x.end(), th.begin());
    Matrix4 rho = rho_from_theta_unchecked(th);
    rho = (rho + rho.adjoint()) * cplx(0.5, 0.0);

    TomographyResult result{DensityMatrix4(rho),
                            best.fx,
                            best.iterations,
                            best.converged,
                            objective.residuals(rho),
                            std::move(start_objectives),
                            0.0,
                            th};
    if (options.compute_hessian) result.hessian_condition = hessian_condition_at(objective, th);
    return result;
}

std::vector<MetricKind> all_metrics() {
    return {MetricKind::purity, MetricKind::concurrence, MetricKind::eof, MetricKind::s_max,
            MetricKind::fidelity_phi_plus};
}

std::string metric_name(MetricKind kind) {
    switch (kind) {
        case MetricKind::purity: return "purity";
        case MetricKind::concurrence: return "concurrence";
        case MetricKind::eof: return "eof_normalized";
        case MetricKind::s_max: return "s_max";
        case MetricKind::fidelity_phi_plus: return "fidelity_phi_plus";
    }
    return "?";
}

namespace {

double evaluate_metric(MetricKind kind, const DensityMatrix4& rho) {
    switch (kind) {
        case MetricKind::purity: return purity(rho);
        case MetricKind::concurrence: return concurrence(rho);
        case MetricKind::eof: return entanglement_of_formation(rho);
        case MetricKind::s_max: return s_max(rho);
        case MetricKind::fidelity_phi_plus: return fidelity(rho, bell_phi_plus());
    }
    return 0.0;
}

MeasurementDataset resample_dataset(const MeasurementDataset& dataset, Rng& rng) {
    MeasurementDataset out = dataset;
    for (DatasetEntry& e : out.entries) {
        if (e.has_counts()) {
            const double c1 = static_cast<double>(rng.poisson(e.counts));
            const double c2 = static_cast<double>(rng.poisson(e.counts_opposite));
            const double total = c1 + c2;
            if (total <= 0.0) {
                e.value = 0.5;
                e.sigma = 0.5;
            } else {
                e.value = c1 / total;
                e.sigma = std::max(std::sqrt(e.value * (1.0 - e.value) / total), 0.5 / total);
            }
            e.counts = c1;
            e.counts_opposite = c2;
        } else {
            e.value = std::clamp(rng.gaussian(e.value, e.sigma), 0.0, 1.0);
        }
    }
    return out;
}

TomographyOptions resample_options(const TomographyOptions& base,
                                   const std::array<double, 16>& warm) {
    TomographyOptions o = base;
    o.random_starts = 2;
    o.compute_hessian = false;
    o.warm_start = warm;
    return o;
}

MetricStats reduce_stats(const std::vector<double>& samples) {
    const double n = static_cast<double>(samples.size());
    double mean = 0.0;
    for (double v : samples) mean += v;
    mean /= n;
    double var = 0.0;
    for (double v : samples) var += (v - mean) * (v - mean);
    var = samples.size() > 1 ? var / (n - 1.0) : 0.0;
    return {mean, std::sqrt(var)};
}

} // namespace

MonteCarloReport monte_carlo_uncertainty(const MeasurementDataset& dataset, int n_resamples,
                                         std::uint64_t seed,
                                         const std::vector<MetricKind>& metrics,
                                         const TomographyOptions& options) {
    if (n_resamples < 100)
        throw ConfigError("monte_carlo_uncertainty: need at least 100 resamples");
    dataset.validate();
    const TomographyResult base = mle_reconstruct(dataset, options);
    const TomographyOptions fast = resample_options(options, base.theta);

    std::map<MetricKind, std::vector<double>> samples;
    for (MetricKind k : metrics) samples[k] = {};
    Rng root(seed, "mc/resample");
    for (int r = 0; r < n_resamples; ++r) {
        Rng rng = root.stream(std::to_string(r));
        const MeasurementDataset ds = resample_dataset(dataset, rng);
        const TomographyResult fit = mle_reconstruct(ds, fast);
        for (MetricKind k : metrics) samples[k].push_back(evaluate_metric(k, fit.rho_hat));
    }

    MonteCarloReport report;
    report.resamples = n_resamples;
    report.seed = seed;
    for (MetricKind k : metrics) report.stats[k] = reduce_stats(samples[k]);
    return report;
}

MetricStats monte_carlo_io_fidelity(const MeasurementDataset& dataset_in,
                                    const MeasurementDataset& dataset_out, int n_resamples,
                                    std::uint64_t seed, const TomographyOptions& options) {
    if (n_resamples < 100)
        throw ConfigError("monte_carlo_io_fidelity: need at least 100 resamples");
    const TomographyResult base_in = mle_reconstruct(dataset_in, options);
    const TomographyResult base_out = mle_reconstruct(dataset_out, options);
    const TomographyOptions fast_in = resample_options(options, base_in.theta);
    const TomographyOptions fast_out = resample_options(options, base_out.theta);

    std::vector<double> samples;
    samples.reserve(n_resamples);
    Rng root_in(seed, "mc-io/in");
    Rng root_out(seed, "mc-io/out");
    for (int r = 0; r < n_resamples; ++r) {
        Rng rin = root_in.stream(std::to_string(r));
        Rng rout = root_out.stream(std::to_string(r));
        const TomographyResult fin = mle_reconstruct(resample_dataset(dataset_in, rin), fast_in);
        const TomographyResult fout =
            mle_reconstruct(resample_dataset(dataset_out, rout), fast_out);
        samples.push_back(fidelity(fin.rho_hat, fout.rho_hat));
    }
    return reduce_stats(samples);
}

double trace_distance(const DensityMatrix4& rho, const DensityMatrix4& sigma) {
    const Matrix4 diff = rho.matrix() - sigma.matrix();
    const EigResult<4> eig = hermitian_eig(diff);
    double sum = 0.0;
    for (double v : eig.values) sum += std::abs(v);
    return 0.5 * sum;
}

} // namespace afcsim
