#include <doctest.h>

#include <cmath>

#include "afcsim/metrics.hpp"
#include "afcsim/rng.hpp"
#include "afcsim/source_model.hpp"
#include "afcsim/table_io.hpp"
#include "afcsim/tomography.hpp"

using namespace afcsim;

namespace {

std::array<double, 16> random_theta(Rng& rng) {
    std::array<double, 16> th{};
    for (double& v : th) v = rng.gaussian();
    return th;
}

DensityMatrix4 state_of(const std::array<double, 16>& th) {
    Matrix4 m = physical_parametrization(th);
    m = (m + m.adjoint()) * cplx(0.5, 0.0);
    return DensityMatrix4(m);
}

TomographyOptions fast_options() {
    TomographyOptions o;
    o.random_starts = 4;
    o.compute_hessian = false;
    return o;
}

} // namespace

TEST_CASE("dataset from counts") {
    std::vector<CoincidenceRecord> records = {
        {{Axis::x, Sign::plus}, {Axis::x, Sign::plus}, 900, 1.0},
        {{Axis::x, Sign::plus}, {Axis::x, Sign::minus}, 100, 1.0},
    };
    const MeasurementDataset ds = dataset_from_counts(records);
    REQUIRE(ds.entries.size() == 2);
    CHECK(ds.entries[0].value == doctest::Approx(0.90));
    CHECK(ds.entries[0].sigma == doctest::Approx(0.009486832980505138).epsilon(1e-12));
    CHECK(ds.entries[1].value == doctest::Approx(0.10));
    CHECK(ds.from_counts());

    records[1].counts = 900;
    CHECK(dataset_from_counts(records).entries[0].value == doctest::Approx(0.5));

    records[1].counts = 0;
    CHECK(dataset_from_counts(records).entries[0].value == doctest::Approx(1.0));

    // Missing partner is reported with the setting name.
    records.pop_back();
    try {
        dataset_from_counts(records);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("+x:-x") != std::string::npos);
    }

    std::vector<CoincidenceRecord> zeros = {
        {{Axis::x, Sign::plus}, {Axis::x, Sign::plus}, 0, 1.0},
        {{Axis::x, Sign::plus}, {Axis::x, Sign::minus}, 0, 1.0},
    };
    CHECK_THROWS_AS(dataset_from_counts(zeros), ConfigError);
}

TEST_CASE("dataset validation") {
    MeasurementDataset dup;
    dup.entries.push_back({{Axis::x, Sign::plus}, {Axis::x, Sign::plus}, 0.5, 0.01});
    dup.entries.push_back({{Axis::x, Sign::plus}, {Axis::x, Sign::plus}, 0.4, 0.01});
    CHECK_THROWS_AS(dup.validate(), ConfigError);

    MeasurementDataset range;
    range.entries.push_back({{Axis::x, Sign::plus}, {Axis::x, Sign::plus}, 1.4, 0.01});
    CHECK_THROWS_AS(range.validate(), ConfigError);
}

TEST_CASE("physical parametrization") {
    std::array<double, 16> th{};
    th[0] = 1.0;  // only the first diagonal slot
    Matrix4 m = physical_parametrization(th);
    CHECK(m(0, 0).real() == doctest::Approx(1.0));
    CHECK(m.max_abs() == doctest::Approx(1.0));

    std::array<double, 16> diag{};
    diag[0] = diag[1] = diag[2] = diag[3] = 0.5;
    m = physical_parametrization(diag);
    for (std::size_t i = 0; i < 4; ++i) CHECK(m(i, i).real() == doctest::Approx(0.25));

    Rng rng(21, "parametrization");
    for (int i = 0; i < 50; ++i) {
        const auto theta = random_theta(rng);
        const Matrix4 rho = physical_parametrization(theta);
        CHECK(std::abs(rho.trace().real() - 1.0) < 1e-12);
        const EigResult<4> eig = hermitian_eig(rho);
        CHECK(eig.values[3] > -1e-12);

        // Scale gauge: theta and c*theta give the same state.
        auto scaled = theta;
        for (double& v : scaled) v *= 2.75;
        CHECK((physical_parametrization(scaled) - rho).max_abs() < 1e-12);
    }

    std::array<double, 16> zero{};
    CHECK_THROWS_AS(physical_parametrization(zero), ConfigError);
}

TEST_CASE("analytic gradient matches finite differences") {
    // The optimizer's gradient is checked against central differences of
    // the same objective, evaluated through the public reconstruction of a
    // perturbed dataset: build the objective directly here via residuals.
    Rng rng(33, "gradient");
    const DensityMatrix4 truth = state_of(random_theta(rng));
    MeasurementDataset ds = exact_probabilities(truth, full_settings(), 0.02);
    // Perturb values so residuals are nonzero.
    for (DatasetEntry& e : ds.entries)
        e.value = std::clamp(e.value + 0.03 * rng.gaussian(), 0.0, 1.0);

    // Finite-difference the *reconstruction objective* by reusing
    // mle_reconstruct on a single fixed start is impractical; instead the
    // gradient is validated indirectly: a converged fit must sit at a
    // stationary point of the weighted objective.
    TomographyOptions opts = fast_options();
    opts.random_starts = 6;
    const TomographyResult fit = mle_reconstruct(ds, opts);
    CHECK(fit.converged);

    // Numerical directional derivatives of the objective at the optimum,
    // evaluated through the residual vector definition.
    auto objective_at = [&](const std::array<double, 16>& th) {
        const Matrix4 rho = physical_parametrization(th);
        double f = 0.0;
        for (const DatasetEntry& e : ds.entries) {
            DensityMatrix4 state((rho + rho.adjoint()) * cplx(0.5, 0.0));
            const double p = joint_probability(state, e.setting_a, e.setting_b);
            const double r = p - e.value;
            f += r * r / (e.sigma * e.sigma);
        }
        return f;
    };
    const double f0 = objective_at(fit.theta);
    Rng dir_rng(34, "directions");
    for (int k = 0; k < 5; ++k) {
        auto th = fit.theta;
        std::array<double, 16> dir{};
        for (double& v : dir) v = dir_rng.gaussian();
        const double h = 1e-4;
        for (std::size_t i = 0; i < 16; ++i) th[i] += h * dir[i];
        const double fp = objective_at(th);
        for (std::size_t i = 0; i < 16; ++i) th[i] -= 2.0 * h * dir[i];
        const double fm = objective_at(th);
        const double directional = (fp - fm) / (2.0 * h);
        CHECK(std::abs(directional) < 2e-2 * std::max(1.0, f0));  // stationary
        CHECK(fp >= f0 - 1e-7);                                   // local minimum
        CHECK(fm >= f0 - 1e-7);
    }
}

TEST_CASE("round trip: Bell state from the 16 published settings") {
    const MeasurementDataset ds = exact_probabilities(bell_phi_plus(), table_settings(), 0.01);
    const TomographyResult fit = mle_reconstruct(ds, fast_options());
    CHECK(fit.converged);
    CHECK(fidelity(fit.rho_hat, bell_phi_plus()) > 0.999);
}

TEST_CASE("round trip: noisy source state") {
    SourceParams p;
    p.p_deph = 0.08;
    p.p_white = 0.12;
    const DensityMatrix4 truth = source_state(p);

    // Informationally complete settings pin the state itself.
    const MeasurementDataset full = exact_probabilities(truth, full_settings(), 0.01);
    const TomographyResult fit = mle_reconstruct(full, fast_options());
    CHECK(fit.converged);
    CHECK(trace_distance(fit.rho_hat, truth) < 1e-3);

    // The published 16-setting layout only determines 12 independent
    // ratios, so the reconstruction is checked on what those identify:
    // every model probability of the fit matches the truth's.
    const MeasurementDataset table = exact_probabilities(truth, table_settings(), 0.01);
    const TomographyResult fit16 = mle_reconstruct(table, fast_options());
    CHECK(fit16.converged);
    for (const DatasetEntry& e : table.entries)
        CHECK(joint_probability(fit16.rho_hat, e.setting_a, e.setting_b) ==
              doctest::Approx(e.value).epsilon(1e-5));
}

TEST_CASE("round trip: random states from the complete setting set") {
    Rng rng(55, "roundtrip");
    for (int trial = 0; trial < 20; ++trial) {
        const DensityMatrix4 truth = state_of(random_theta(rng));
        const MeasurementDataset ds = exact_probabilities(truth, full_settings(), 0.01);
        const TomographyResult fit = mle_reconstruct(ds, fast_options());
        CHECK(trace_distance(fit.rho_hat, truth) < 1e-3);
    }
}

TEST_CASE("reconstruction is deterministic for a fixed seed") {
    const MeasurementDataset ds = read_probability_table(data_dir() + "/table1_pin.csv");
    TomographyOptions opts;
    opts.seed = 991;
    const TomographyResult a = mle_reconstruct(ds, opts);
    const TomographyResult b = mle_reconstruct(ds, opts);
    CHECK((a.rho_hat.matrix() - b.rho_hat.matrix()).max_abs() == 0.0);
    CHECK(a.objective_value == b.objective_value);
    REQUIRE(a.start_objectives.size() == b.start_objectives.size());
    for (std::size_t i = 0; i < a.start_objectives.size(); ++i)
        CHECK(a.start_objectives[i] == b.start_objectives[i]);
}

TEST_CASE("published input table lands on the published metrics") {
    const MeasurementDataset ds = read_probability_table(data_dir() + "/table1_pin.csv");
    const TomographyResult fit = mle_reconstruct(ds);
    CHECK(fit.converged);
    CHECK(purity(fit.rho_hat) == doctest::Approx(0.757).epsilon(2.0 * 0.024 / 0.757));
    CHECK(concurrence(fit.rho_hat) == doctest::Approx(0.741).epsilon(2.0 * 0.033 / 0.741));
    // Residuals stay within 3 printed sigmas.
    for (std::size_t i = 0; i < fit.residuals.size(); ++i)
        CHECK(std::abs(fit.residuals[i]) < 3.0 * std::max(ds.entries[i].sigma, 1e-6));
}

TEST_CASE("under-determined eight-setting data is flagged by the Hessian") {
    SourceParams p;
    p.p_deph = 0.08;
    p.p_white = 0.12;
    const DensityMatrix4 truth = source_state(p);
    auto settings = table_settings();
    settings.resize(8);
    const MeasurementDataset ds = exact_probabilities(truth, settings, 0.01);
    TomographyOptions opts;
    opts.random_starts = 4;
    const TomographyResult fit = mle_reconstruct(ds, opts);
    CHECK(fit.hessian_condition > 1e8);

    // The complete 36-setting dataset is well conditioned in comparison.
    const MeasurementDataset full = exact_probabilities(truth, full_settings(), 0.01);
    const TomographyResult good = mle_reconstruct(full, opts);
    CHECK(good.hessian_condition < 1e8);
    CHECK(good.hessian_condition > 1.0);
}

TEST_CASE("monte carlo uncertainty") {
    const MeasurementDataset ds = read_probability_table(data_dir() + "/table1_pin.csv");

    SUBCASE("zero sigmas give zero spread") {
        MeasurementDataset frozen = ds;
        for (DatasetEntry& e : frozen.entries) e.sigma = 0.0;
        const MonteCarloReport mc =
            monte_carlo_uncertainty(frozen, 100, 5, {MetricKind::purity}, fast_options());
        CHECK(mc.stats.at(MetricKind::purity).sigma < 1e-12);  // identical resamples
    }

    SUBCASE("sigma scales linearly in the small-noise regime") {
        MeasurementDataset small = ds, big = ds;
        for (DatasetEntry& e : small.entries) e.sigma = 0.002;
        for (DatasetEntry& e : big.entries) e.sigma = 0.004;
        const auto mc_small =
            monte_carlo_uncertainty(small, 120, 7, {MetricKind::purity}, fast_options());
        const auto mc_big =
            monte_carlo_uncertainty(big, 120, 7, {MetricKind::purity}, fast_options());
        const double ratio = mc_big.stats.at(MetricKind::purity).sigma /
                             mc_small.stats.at(MetricKind::purity).sigma;
        CHECK(ratio > 1.5);
        CHECK(ratio < 2.7);
    }

    SUBCASE("determinism and validation") {
        const auto a =
            monte_carlo_uncertainty(ds, 100, 17, {MetricKind::concurrence}, fast_options());
        const auto b =
            monte_carlo_uncertainty(ds, 100, 17, {MetricKind::concurrence}, fast_options());
        CHECK(a.stats.at(MetricKind::concurrence).mean ==
              b.stats.at(MetricKind::concurrence).mean);
        CHECK(a.stats.at(MetricKind::concurrence).sigma ==
              b.stats.at(MetricKind::concurrence).sigma);

        CHECK_THROWS_AS(monte_carlo_uncertainty(ds, 50, 17, {MetricKind::purity}),
                        ConfigError);
        MeasurementDataset bad = ds;
        bad.entries[0].sigma = -0.1;
        CHECK_THROWS_AS(monte_carlo_uncertainty(bad, 100, 17, {MetricKind::purity}),
                        ConfigError);
    }
}

TEST_CASE("poisson resampling of counts-backed datasets") {
    SourceParams p;
    p.p_deph = 0.08;
    p.p_white = 0.12;
    const DensityMatrix4 truth = source_state(p);
    DetectorParams det;
    RunPlan plan;
    plan.pair_rate_hz = 1000.0;
    plan.integration_s = 20.0;
    const auto counts = simulate_counts(truth, table_settings_with_partners(), plan, det, 815);
    const MeasurementDataset ds = dataset_from_counts(counts);
    REQUIRE(ds.from_counts());
    const MonteCarloReport mc =
        monte_carlo_uncertainty(ds, 120, 99, {MetricKind::concurrence}, fast_options());
    CHECK(mc.stats.at(MetricKind::concurrence).sigma > 0.0);
    CHECK(mc.stats.at(MetricKind::concurrence).sigma < 0.2);
}

TEST_CASE("trace distance") {
    CHECK(trace_distance(bell_phi_plus(), bell_phi_plus()) == doctest::Approx(0.0));
    const DensityMatrix4 mixed(Matrix4::identity() * cplx(0.25, 0.0));
    CHECK(trace_distance(bell_phi_plus(), mixed) == doctest::Approx(0.75).epsilon(1e-9));
}
