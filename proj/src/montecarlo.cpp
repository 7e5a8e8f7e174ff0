#include "perimax/montecarlo.hpp"

#include <cmath>
#include <ostream>

#include "perimax/errors.hpp"
#include "perimax/parallel.hpp"

namespace perimax {

std::vector<double> run_replications(std::size_t reps, std::uint64_t master_seed, int threads,
                                     const std::function<double(std::size_t, Xoshiro256pp&)>& body) {
    std::vector<double> out(reps);
    parallel_chunks(reps, threads, [&](std::size_t, std::size_t begin, std::size_t end) {
        for (std::size_t rep = begin; rep < end; ++rep) {
            Xoshiro256pp rng(mix_seed(master_seed, rep));
            out[rep] = body(rep, rng);
        }
    });
    return out;
}

std::vector<PStudyCell> p_study(const PStudyOptions& options) {
    if (options.reps < 1) throw config_error("table needs at least one replication");
    std::vector<PStudyCell> cells;
    cells.reserve(options.ps.size() * options.ns.size());
    std::size_t cell_index = 0;
    for (double p : options.ps) {
        for (std::size_t n : options.ns) {
            if (n + 1 < 2 * static_cast<std::size_t>(options.period))
                throw config_error("cell n too small for one estimation block");
            const std::uint64_t cell_seed = mix_seed(options.master_seed, ++cell_index);
            const auto estimates = run_replications(
                options.reps, cell_seed, options.threads,
                [&](std::size_t, Xoshiro256pp& rng) {
                    const std::uint64_t path_seed = rng.next_u64();
                    const std::uint64_t mask_seed = rng.next_u64();
                    const ProcessPath path = generate_path(options.process, n, path_seed);
                    const ControlMask mask = generate_mask(n, options.period, p, mask_seed);
                    return estimate_p(impute(path, mask), options.rule).p_hat;
                });
            cells.push_back(PStudyCell{p, n, summarize(estimates, p)});
        }
    }
    return cells;
}

void write_p_study_csv(std::ostream& out, std::span<const PStudyCell> cells) {
    out << "p,n,mean,bias,sd,rmse\n";
    for (const auto& cell : cells) {
        out << cell.p << ',' << cell.n << ',' << cell.stats.mean << ',' << cell.stats.bias << ','
            << cell.stats.sd << ',' << cell.stats.rmse << '\n';
    }
}

ThetaReport theta_compare(const ModelConfig& model, const ThetaCompareOptions& options) {
    model.validate();
    ThetaReport report;
    report.model = model;
    report.tau = tau_for_model(model, options.tau_x);
    report.level = normalized_level(model.process, options.runs_n, options.tau_x);

    if (options.want_closed && theta_y_closed_form_supported(model))
        report.closed_form = theta_y_closed_form(model);

    if (options.want_plugin) {
        PluginOptions plugin = options.plugin;
        plugin.tau_x = options.tau_x;
        if (plugin.seed == 0) plugin.seed = mix_seed(options.master_seed, 1);
        plugin.threads = options.threads;
        report.plugin = plugin_theta(model, plugin);
    }

    if (options.want_runs) {
        const int run_length = options.run_length > 0 ? options.run_length : model.period + 1;
        // Paths are generated in replication order with per-replication
        // seeds; counts pool into a single ratio.
        RunsAccumulator acc(run_length);
        const std::uint64_t runs_seed = mix_seed(options.master_seed, 2);
        for (std::size_t rep = 0; rep < options.runs_paths; ++rep) {
            Xoshiro256pp rng(mix_seed(runs_seed, rep));
            const ProcessPath path =
                generate_path(model.process, options.runs_n, rng.next_u64());
            const ControlMask mask =
                generate_mask(options.runs_n, model.period, model.p, rng.next_u64());
            const ImputedSeries series = impute(path, mask);
            acc.add_path(std::span<const double>(series.y).subspan(1), report.level);
        }
        report.runs = acc.result(report.level);
    }
    return report;
}

ThetaSurface theta_surface(std::span<const double> theta_x_grid, std::span<const double> p_grid) {
    ThetaSurface surface;
    surface.theta_x_grid.assign(theta_x_grid.begin(), theta_x_grid.end());
    surface.p_grid.assign(p_grid.begin(), p_grid.end());
    surface.values.reserve(theta_x_grid.size() * p_grid.size());
    for (double th : theta_x_grid) {
        if (!(th > 0.0 && th <= 1.0))
            throw config_error("theta_x grid values must lie in (0,1]");
        for (double p : p_grid) {
            if (!(p > 0.0 && p < 1.0)) throw config_error("p grid values must lie in (0,1)");
            const double num = 3.0 * th + th * th * (-3.0 + 4.0 * p - p * p) +
                               th * th * th * (1.0 - p) * (1.0 - p);
            surface.values.push_back(num / (3.0 + p * (1.0 - p) * th));
        }
    }
    return surface;
}

void write_surface_csv(std::ostream& out, const ThetaSurface& surface) {
    out << "theta_x\\p";
    for (double p : surface.p_grid) out << ',' << p;
    out << '\n';
    for (std::size_t i = 0; i < surface.theta_x_grid.size(); ++i) {
        out << surface.theta_x_grid[i];
        for (std::size_t j = 0; j < surface.p_grid.size(); ++j)
            out << ',' << surface.values[i * surface.p_grid.size() + j];
        out << '\n';
    }
}

MarginalCheckResult marginal_check(const ModelConfig& model, int j, std::size_t samples,
                                   std::uint64_t seed) {
    model.validate();
    if (j < 0 || j >= model.period) throw config_error("offset j must lie in 0..T-1");
    if (samples < 10) throw config_error("marginal check needs at least 10 samples");
    const std::size_t T = static_cast<std::size_t>(model.period);
    const std::size_t n = (samples + 1) * T + static_cast<std::size_t>(j);
    Xoshiro256pp rng(seed);
    const ProcessPath path = generate_path(model.process, n, rng.next_u64());
    const ControlMask mask = generate_mask(n, model.period, model.p, rng.next_u64());
    const ImputedSeries series = impute(path, mask);
    std::vector<double> draws;
    draws.reserve(samples);
    for (std::size_t s = 1; s <= samples; ++s) draws.push_back(series.y[s * T + j]);

    MarginalCheckResult result;
    result.samples = samples;
    result.critical_1pct = ks_critical_1pct(samples);
    result.ks = ks_statistic(draws, [&](double x) { return marginal_cdf_fj(model, j, x); });
    return result;
}

} // namespace perimax
