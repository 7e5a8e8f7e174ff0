#include <doctest.h>

#include <cmath>
#include <sstream>

#include "perimax/errors.hpp"
#include "perimax/montecarlo.hpp"

using namespace perimax;

namespace {

std::string table_csv(const PStudyOptions& options) {
    std::ostringstream out;
    out.precision(17);
    write_p_study_csv(out, p_study(options));
    return out.str();
}

} // namespace

TEST_CASE("replication harness: determinism and order independence") {
    const auto body = [](std::size_t rep, Xoshiro256pp& rng) {
        return static_cast<double>(rep) + rng.next_unit();
    };
    const auto serial = run_replications(500, 42, 1, body);
    const auto threaded = run_replications(500, 42, 3, body);
    const auto threaded8 = run_replications(500, 42, 8, body);
    CHECK(serial == threaded);
    CHECK(serial == threaded8);

    const auto single = run_replications(1, 42, 1, body);
    Xoshiro256pp rng(mix_seed(42, 0));
    CHECK(single[0] == body(0, rng));
}

TEST_CASE("estimator study table: reproducibility across runs and workers") {
    PStudyOptions options;
    options.ps = {0.25, 0.75};
    options.ns = {250, 1000};
    options.reps = 200;
    const std::string a = table_csv(options);
    const std::string b = table_csv(options);
    CHECK(a == b);
    options.threads = 4;
    CHECK(table_csv(options) == a);
    options.threads = 8;
    CHECK(table_csv(options) == a);
}

TEST_CASE("estimator study table: distribution of one cell") {
    PStudyOptions options;
    options.ps = {0.5};
    options.ns = {1000};
    options.reps = 400;
    const auto cells = p_study(options);
    REQUIRE(cells.size() == 1);
    const SummaryStats& s = cells[0].stats;
    // The estimator is binomial over 499 blocks here: mean p, sd
    // sqrt(p(1-p)/499).
    const double binom_sd = std::sqrt(0.25 / 499.0);
    CHECK(std::abs(s.mean - 0.5) <= 4.0 * binom_sd / std::sqrt(400.0));
    CHECK(std::abs(s.sd - binom_sd) <= 0.25 * binom_sd);
}

TEST_CASE("summary statistics satisfy the rmse decomposition") {
    PStudyOptions options;
    options.ps = {0.1, 0.9};
    options.ns = {250};
    options.reps = 300;
    for (const auto& cell : p_study(options)) {
        const SummaryStats& s = cell.stats;
        const double reconstructed =
            s.bias * s.bias +
            s.sd * s.sd * static_cast<double>(s.reps - 1) / static_cast<double>(s.reps);
        CHECK(s.rmse * s.rmse == doctest::Approx(reconstructed).epsilon(1e-9));
    }
}

TEST_CASE("estimator rmse shrinks with the sample size") {
    PStudyOptions options;
    options.ps = {0.1, 0.25, 0.5, 0.75, 0.9};
    options.ns = {250, 1000, 5000};
    options.reps = 400;
    const auto cells = p_study(options);
    for (std::size_t row = 0; row < options.ps.size(); ++row) {
        const double r250 = cells[row * 3 + 0].stats.rmse;
        const double r1000 = cells[row * 3 + 1].stats.rmse;
        const double r5000 = cells[row * 3 + 2].stats.rmse;
        CHECK(r250 > r1000);
        CHECK(r1000 > r5000);
    }
}

TEST_CASE("study table rejects cells too small for one block") {
    PStudyOptions options;
    options.ps = {0.5};
    options.ns = {2};
    options.period = 3;
    CHECK_THROWS_AS(p_study(options), config_error);
}

TEST_CASE("theta comparison report: moving maxima T=2") {
    const ModelConfig model{moving_maxima_process(), 2, 0.3};
    ThetaCompareOptions options;
    options.runs_paths = 60;
    options.plugin.reps = 500'000;
    options.master_seed = 2025;
    const ThetaReport report = theta_compare(model, options);
    REQUIRE(report.closed_form.has_value());
    CHECK(*report.closed_form == 0.5);
    REQUIRE(report.runs.has_value());
    CHECK(std::abs(report.runs->value - 0.5) <= 0.05);
    REQUIRE(report.plugin.has_value());
    CHECK(std::abs(report.plugin->value - 0.5) <= 3.0 * report.plugin->std_error);
    CHECK(report.tau.tau == doctest::Approx(20.0).epsilon(1e-12)); // T = 2
}

TEST_CASE("theta comparison report: armax T=3 plugin vs closed form") {
    const ModelConfig model{armax_process(0.5, 1.0), 3, 0.5};
    ThetaCompareOptions options;
    options.want_runs = false;
    options.plugin.reps = 800'000;
    options.master_seed = 99;
    const ThetaReport report = theta_compare(model, options);
    REQUIRE(report.closed_form.has_value());
    CHECK(*report.closed_form == doctest::Approx(0.39).epsilon(1e-12));
    REQUIRE(report.plugin.has_value());
    CHECK(std::abs(report.plugin->value - 0.39) <= 3.0 * report.plugin->std_error + 0.005);
}

TEST_CASE("theta comparison report: iid T=3 runs estimate") {
    const ModelConfig model{iid_process(), 3, 0.9};
    ThetaCompareOptions options;
    options.want_plugin = false;
    options.runs_paths = 60;
    options.master_seed = 31;
    const ThetaReport report = theta_compare(model, options);
    const double closed = (1.0 + 1.8) / (3.0 + 0.09);
    REQUIRE(report.closed_form.has_value());
    CHECK(*report.closed_form == doctest::Approx(closed).epsilon(1e-12));
    REQUIRE(report.runs.has_value());
    CHECK(std::abs(report.runs->value - closed) <= 0.05);
}

TEST_CASE("closed-form surface: boundary behaviour") {
    std::vector<double> th_grid, p_grid;
    for (int i = 1; i <= 10; ++i) th_grid.push_back(i / 10.0);
    p_grid = {0.001, 0.5, 0.999};
    const ThetaSurface surface = theta_surface(th_grid, p_grid);
    REQUIRE(surface.values.size() == 30);
    for (std::size_t i = 0; i < th_grid.size(); ++i) {
        const double near_one = surface.values[i * 3 + 2]; // p = 0.999
        CHECK(std::abs(near_one - th_grid[i]) <= 1e-2);
    }
    // theta_x = 1, p -> 0 corner sits at 1/3.
    CHECK(std::abs(surface.values[9 * 3 + 0] - 1.0 / 3.0) <= 2e-3);
    // small theta_x drives the index to zero.
    CHECK(surface.values[0 * 3 + 1] < 0.12);

    CHECK_THROWS_AS(theta_surface(std::vector<double>{1.5}, std::vector<double>{0.5}),
                    config_error);
    CHECK_THROWS_AS(theta_surface(std::vector<double>{0.5}, std::vector<double>{1.0}),
                    config_error);

    std::ostringstream out;
    write_surface_csv(out, surface);
    CHECK(out.str().find("theta_x\\p") == 0);
}

TEST_CASE("marginal mixture law versus simulated draws") {
    // iid T=3, j=2: KS within the 1% band against the closed form.
    for (double p : {0.3, 0.7}) {
        const MarginalCheckResult res = marginal_check({iid_process(), 3, p}, 2, 10'000, 5150);
        CHECK(res.ks <= res.critical_1pct);
    }
    // j = 0 reduces to the plain marginal.
    const MarginalCheckResult res0 =
        marginal_check({moving_maxima_process(), 2, 0.5}, 0, 10'000, 5151);
    CHECK(res0.ks <= res0.critical_1pct);
    // p near 1: every offset collapses to the marginal.
    const MarginalCheckResult res1 = marginal_check({iid_process(), 3, 0.999}, 2, 10'000, 5152);
    CHECK(res1.ks <= res1.critical_1pct);
}
