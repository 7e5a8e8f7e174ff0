#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "perimax/errors.hpp"
#include "perimax/estimation.hpp"
#include "perimax/series_io.hpp"

using namespace perimax;

namespace {

std::filesystem::path scratch_file(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / "perimax_io_tests";
    std::filesystem::create_directories(dir);
    return dir / name;
}

ImputedSeries make_series(const ModelConfig& model, std::size_t n, std::uint64_t seed) {
    const ProcessPath path = generate_path(model.process, n, seed);
    const ControlMask mask = generate_mask(n, model.period, model.p, seed + 1);
    return impute(path, mask);
}

} // namespace

TEST_CASE("shortest round-trip rendering of doubles") {
    Xoshiro256pp rng(515);
    for (int trial = 0; trial < 2000; ++trial) {
        const double x = unit_frechet().sample(rng); // spans many magnitudes
        const std::string text = format_double(x);
        CHECK(std::stod(text) == x);
    }
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(2.0) == "2");
}

TEST_CASE("series files round-trip bit-exactly") {
    for (const ModelConfig model : {ModelConfig{moving_maxima_process(), 2, 0.5},
                                    ModelConfig{iid_process(), 3, 0.3},
                                    ModelConfig{armax_process(0.5, 1.0), 4, 0.7}}) {
        const ImputedSeries series = make_series(model, 300, 77);
        const auto file = scratch_file("roundtrip_" + to_string(model.process.kind) + ".csv");
        write_series(file, series, SeriesFileHeader{model, 77, 78});
        const LoadedSeries loaded = read_series(file);

        REQUIRE(loaded.series.n() == series.n());
        for (std::size_t k = 0; k <= series.n(); ++k) {
            CHECK(loaded.series.x.values[k] == series.x.values[k]);
            CHECK(loaded.series.mask.u[k] == series.mask.u[k]);
            if (k >= 1) {
                CHECK(loaded.series.y[k] == series.y[k]);
                CHECK(loaded.series.imputed[k] == series.imputed[k]);
            }
        }
        CHECK(loaded.header.model.period == model.period);
        CHECK(loaded.header.model.p == model.p);
        CHECK(loaded.header.model.process.kind == model.process.kind);
        CHECK(loaded.header.path_seed == 77);

        // Estimation on the reloaded series is identical, stagnation ties
        // included.
        const PHatResult a = estimate_p(series);
        const PHatResult b = estimate_p(loaded.series);
        CHECK(a.indicator_sum == b.indicator_sum);
        CHECK(a.p_hat == b.p_hat);
        const PHatResult am = estimate_p(series, StagnationRule::imputation_mask);
        const PHatResult bm = estimate_p(loaded.series, StagnationRule::imputation_mask);
        CHECK(am.indicator_sum == bm.indicator_sum);
    }
}

TEST_CASE("series reader rejects broken inputs") {
    const ModelConfig model{moving_maxima_process(), 2, 0.5};
    const ImputedSeries series = make_series(model, 20, 3);
    const auto file = scratch_file("broken.csv");
    write_series(file, series, SeriesFileHeader{model, 3, 4});

    SUBCASE("missing sidecar") {
        std::filesystem::remove(sidecar_path(file));
        CHECK_THROWS_AS(read_series(file), structural_error);
    }
    SUBCASE("malformed row") {
        std::ofstream out(file, std::ios::app);
        out << "21,not_a_number,1,2.0,0\n";
        out.close();
        CHECK_THROWS_AS(read_series(file), structural_error);
    }
    SUBCASE("row count mismatch") {
        std::ofstream out(file, std::ios::app);
        out << "9,1.0,1,1.0,0\n";
        out.close();
        CHECK_THROWS_AS(read_series(file), structural_error);
    }
    SUBCASE("control index marked unavailable") {
        ImputedSeries corrupt = series;
        corrupt.mask.u[2] = 0; // index 2 is a control for T = 2
        write_series(file, corrupt, SeriesFileHeader{model, 3, 4});
        CHECK_THROWS_AS(read_series(file), structural_error);
    }
}

TEST_CASE("series writer leaves no partial files behind") {
    const ModelConfig model{iid_process(), 2, 0.5};
    const ImputedSeries series = make_series(model, 50, 9);
    const auto file = scratch_file("atomic.csv");
    write_series(file, series, SeriesFileHeader{model, 9, 10});
    CHECK(std::filesystem::exists(file));
    CHECK(std::filesystem::exists(sidecar_path(file)));
    CHECK_FALSE(std::filesystem::exists(file.string() + ".tmp"));
}
