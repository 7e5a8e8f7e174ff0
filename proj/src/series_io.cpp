#include "perimax/series_io.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>

#include <nlohmann/json.hpp>

#include "perimax/errors.hpp"

namespace perimax {

namespace {

using nlohmann::json;

json process_to_json(const ProcessConfig& config) {
    json j{{"kind", to_string(config.kind)},
           {"alpha", config.dist.alpha},
           {"scale", config.dist.scale}};
    if (config.kind == ProcessKind::armax) j["t"] = config.t;
    return j;
}

ProcessConfig process_from_json(const json& j) {
    ProcessConfig config;
    config.kind = process_kind_from_string(j.at("kind").get<std::string>());
    config.dist.alpha = j.at("alpha").get<double>();
    config.dist.scale = j.at("scale").get<double>();
    config.t = j.value("t", 0.0);
    config.validate();
    return config;
}

double parse_double(std::string_view text, std::size_t line_no) {
    double value = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size())
        throw structural_error("bad numeric field '" + std::string(text) + "' on line " +
                               std::to_string(line_no));
    return value;
}

void atomic_write(const std::filesystem::path& path, const std::string& content) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw structural_error("cannot open '" + tmp.string() + "' for writing");
        out << content;
        if (!out) throw structural_error("write failed for '" + tmp.string() + "'");
    }
    std::filesystem::rename(tmp, path);
}

} // namespace

std::string format_double(double value) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

std::filesystem::path sidecar_path(const std::filesystem::path& csv_path) {
    return std::filesystem::path(csv_path.string() + ".json");
}

void write_series(const std::filesystem::path& csv_path, const ImputedSeries& series,
                  const SeriesFileHeader& header) {
    std::ostringstream csv;
    csv << "index,x,u,y,imputed\n";
    csv << "0," << format_double(series.x.values[0]) << ','
        << static_cast<int>(series.mask.u[0]) << ",,\n";
    for (std::size_t k = 1; k <= series.n(); ++k) {
        csv << k << ',' << format_double(series.x.values[k]) << ','
            << static_cast<int>(series.mask.u[k]) << ',' << format_double(series.y[k]) << ','
            << static_cast<int>(series.imputed[k]) << '\n';
    }
    atomic_write(csv_path, csv.str());

    json meta{{"process", process_to_json(header.model.process)},
              {"T", header.model.period},
              {"p", header.model.p},
              {"path_seed", header.path_seed},
              {"mask_seed", header.mask_seed},
              {"n", series.n()}};
    atomic_write(sidecar_path(csv_path), meta.dump(2) + "\n");
}

LoadedSeries read_series(const std::filesystem::path& csv_path) {
    std::ifstream meta_in(sidecar_path(csv_path));
    if (!meta_in)
        throw structural_error("missing sidecar '" + sidecar_path(csv_path).string() + "'");
    json meta = json::parse(meta_in);

    LoadedSeries loaded;
    loaded.header.model.process = process_from_json(meta.at("process"));
    loaded.header.model.period = meta.at("T").get<int>();
    loaded.header.model.p = meta.at("p").get<double>();
    loaded.header.path_seed = meta.at("path_seed").get<std::uint64_t>();
    loaded.header.mask_seed = meta.at("mask_seed").get<std::uint64_t>();
    loaded.header.model.validate();
    const std::size_t n = meta.at("n").get<std::size_t>();

    std::ifstream in(csv_path);
    if (!in) throw structural_error("cannot open '" + csv_path.string() + "'");
    std::string line;
    if (!std::getline(in, line) || line != "index,x,u,y,imputed")
        throw structural_error("unexpected series header in '" + csv_path.string() + "'");

    ImputedSeries& series = loaded.series;
    series.x.config = loaded.header.model.process;
    series.x.seed = loaded.header.path_seed;
    series.x.values.assign(n + 1, 0.0);
    series.mask.period = loaded.header.model.period;
    series.mask.p = loaded.header.model.p;
    series.mask.seed = loaded.header.mask_seed;
    series.mask.u.assign(n + 1, 0);
    series.y.assign(n + 1, 0.0);
    series.imputed.assign(n + 1, 0);

    std::size_t line_no = 1;
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::string_view view(line);
        std::array<std::string_view, 5> fields;
        std::size_t field = 0;
        while (field < 5) {
            const std::size_t comma = view.find(',');
            fields[field++] = view.substr(0, comma);
            if (comma == std::string_view::npos) break;
            view.remove_prefix(comma + 1);
        }
        if (field != 5)
            throw structural_error("malformed row on line " + std::to_string(line_no));
        const std::size_t k =
            static_cast<std::size_t>(parse_double(fields[0], line_no));
        if (k > n) throw structural_error("row index out of range on line " + std::to_string(line_no));
        series.x.values[k] = parse_double(fields[1], line_no);
        series.mask.u[k] = fields[2] == "1" ? 1 : 0;
        if (k >= 1) {
            series.y[k] = parse_double(fields[3], line_no);
            series.imputed[k] = fields[4] == "1" ? 1 : 0;
        }
        ++rows;
    }
    if (rows != n + 1)
        throw structural_error("expected " + std::to_string(n + 1) + " rows, found " +
                               std::to_string(rows));
    const std::size_t T = static_cast<std::size_t>(series.mask.period);
    for (std::size_t k = 0; k <= n; k += T)
        if (series.mask.u[k] != 1)
            throw structural_error("control index " + std::to_string(k) +
                                   " is marked unavailable");
    return loaded;
}

} // namespace perimax
