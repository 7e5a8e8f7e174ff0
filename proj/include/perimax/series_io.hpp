#pragma once

#include <filesystem>
#include <string>

#include "perimax/imputation.hpp"
#include "perimax/theory.hpp"

namespace perimax {

// On-disk representation of a simulated series: a CSV with columns
// index,x,u,y,imputed (row 0 leaves y and imputed empty, since Y starts at
// index 1) plus a JSON sidecar `<path>.json` holding the model and the seeds.
// Reals are written in shortest round-trip decimal form, so reading a file
// back reproduces every value bit-exactly, stagnation ties included.

struct SeriesFileHeader {
    ModelConfig model;
    std::uint64_t path_seed = 0;
    std::uint64_t mask_seed = 0;
};

std::filesystem::path sidecar_path(const std::filesystem::path& csv_path);

// Writes CSV and sidecar atomically (write to temporary, then rename).
void write_series(const std::filesystem::path& csv_path, const ImputedSeries& series,
                  const SeriesFileHeader& header);

struct LoadedSeries {
    ImputedSeries series;
    SeriesFileHeader header;
};

LoadedSeries read_series(const std::filesystem::path& csv_path);

// Canonical shortest-round-trip rendering of a double, shared by every CSV
// writer in the toolkit.
std::string format_double(double value);

} // namespace perimax
