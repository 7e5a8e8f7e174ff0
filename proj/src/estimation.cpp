#include "perimax/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "perimax/errors.hpp"
#include "perimax/parallel.hpp"
#include "perimax/rng.hpp"
#include "perimax/stats.hpp"

namespace perimax {

std::string to_string(StagnationRule rule) {
    return rule == StagnationRule::value_equality ? "values" : "mask";
}

StagnationRule stagnation_rule_from_string(const std::string& name) {
    if (name == "values" || name == "value_equality") return StagnationRule::value_equality;
    if (name == "mask" || name == "imputation_mask") return StagnationRule::imputation_mask;
    throw config_error("unknown stagnation rule '" + name + "' (expected values|mask)");
}

std::string to_string(ThetaMethod method) {
    switch (method) {
        case ThetaMethod::runs: return "runs";
        case ThetaMethod::plugin: return "plugin";
        case ThetaMethod::closed_form: return "closed";
    }
    return "?";
}

namespace {

std::size_t count_stagnant_blocks(const ImputedSeries& series, StagnationRule rule,
                                  std::size_t m) {
    std::size_t sum = 0;
    for (std::size_t s = 1; s <= m; ++s) {
        const bool hit = rule == StagnationRule::value_equality
                             ? stagnation_indicator(series, s)
                             : stagnation_indicator_mask(series, s);
        sum += hit ? 1 : 0;
    }
    return sum;
}

} // namespace

PHatResult estimate_p(const ImputedSeries& series, StagnationRule rule) {
    const int T = series.period();
    const std::size_t m = block_count(series.n(), T);
    if (m < 1)
        throw sample_too_short_error("need n >= 2T-1 for at least one estimation block");
    const std::size_t sum = count_stagnant_blocks(series, rule, m);
    const double frac = static_cast<double>(sum) / static_cast<double>(m);
    const double p_hat = 1.0 - std::pow(frac, 1.0 / static_cast<double>(T - 1));
    return PHatResult{m, sum, p_hat};
}

FrequencyResult stagnation_frequency(const ImputedSeries& series, StagnationRule rule) {
    const int T = series.period();
    const std::size_t m = block_count(series.n(), T);
    if (m < 1)
        throw sample_too_short_error("need n >= 2T-1 for at least one estimation block");
    const std::size_t sum = count_stagnant_blocks(series, rule, m);
    const double freq = static_cast<double>(sum) / static_cast<double>(m);
    return FrequencyResult{freq, binomial_se(freq, m), m};
}

EmpiricalCdf::EmpiricalCdf(std::vector<double> data) : data_(std::move(data)) {
    if (data_.empty()) throw sample_too_short_error("empirical cdf needs at least one observation");
    std::sort(data_.begin(), data_.end());
}

double EmpiricalCdf::operator()(double x) const {
    const auto it = std::upper_bound(data_.begin(), data_.end(), x);
    return static_cast<double>(it - data_.begin()) / static_cast<double>(data_.size());
}

EmpiricalCdf ecdf_from_controls(const ImputedSeries& series) {
    const std::size_t T = static_cast<std::size_t>(series.period());
    std::vector<double> controls;
    for (std::size_t k = T; k <= series.n(); k += T) controls.push_back(series.y[k]);
    if (controls.empty())
        throw sample_too_short_error("no control-time observations with index >= T");
    return EmpiricalCdf(std::move(controls));
}

namespace {

struct RunsCounts {
    std::size_t exceedances = 0;
    std::size_t clusters = 0;
};

RunsCounts count_runs(std::span<const double> values, double level, int run_length) {
    if (run_length < 1) throw config_error("run length must be at least 1");
    RunsCounts c;
    long long gap = -1; // -1: before the first exceedance
    for (double v : values) {
        if (v > level) {
            if (gap < 0 || gap >= run_length) ++c.clusters;
            ++c.exceedances;
            gap = 0;
        } else if (gap >= 0) {
            ++gap;
        }
    }
    return c;
}

} // namespace

ThetaEstimate runs_extremal_index(std::span<const double> values, double level, int run_length) {
    const RunsCounts c = count_runs(values, level, run_length);
    if (c.exceedances == 0)
        throw undefined_estimate_error("no exceedances of the level; raise tau or n");
    ThetaEstimate est;
    est.method = ThetaMethod::runs;
    est.level = level;
    est.run_length_or_s = run_length;
    est.exceedance_count = c.exceedances;
    est.cluster_count = c.clusters;
    est.value = static_cast<double>(c.clusters) / static_cast<double>(c.exceedances);
    est.std_error =
        est.value * std::sqrt((1.0 - est.value) / static_cast<double>(std::max<std::size_t>(c.clusters, 1)));
    return est;
}

void RunsAccumulator::add_path(std::span<const double> values, double level) {
    const RunsCounts c = count_runs(values, level, run_length_);
    total_exceedances_ += c.exceedances;
    total_clusters_ += c.clusters;
    per_path_exceedances_.push_back(c.exceedances);
    per_path_clusters_.push_back(c.clusters);
}

ThetaEstimate RunsAccumulator::result(double level) const {
    if (total_exceedances_ == 0)
        throw undefined_estimate_error("no exceedances across the pooled paths");
    ThetaEstimate est;
    est.method = ThetaMethod::runs;
    est.level = level;
    est.run_length_or_s = run_length_;
    est.exceedance_count = total_exceedances_;
    est.cluster_count = total_clusters_;
    est.value = static_cast<double>(total_clusters_) / static_cast<double>(total_exceedances_);
    // Ratio-estimator variance over path-level totals.
    double ssq = 0.0;
    for (std::size_t i = 0; i < per_path_clusters_.size(); ++i) {
        const double r = static_cast<double>(per_path_clusters_[i]) -
                         est.value * static_cast<double>(per_path_exceedances_[i]);
        ssq += r * r;
    }
    est.std_error = std::sqrt(ssq) / static_cast<double>(total_exceedances_);
    return est;
}

ThetaEstimate plugin_theta(const ModelConfig& model, const PluginOptions& options) {
    model.validate();
    const int T = model.period;
    const int s = options.s > 0 ? options.s : T + 1;
    if (options.reps < 1) throw config_error("plugin estimator needs at least one replication");
    const double u = normalized_level(model.process, options.n, options.tau_x);
    const std::size_t len = static_cast<std::size_t>(T + s - 1); // Y defined up to T+s-1

    const std::size_t reps = options.reps;
    std::vector<std::uint64_t> part_sum(chunk_slots(options.threads), 0);
    std::vector<std::uint64_t> part_sumsq(chunk_slots(options.threads), 0);

    parallel_chunks(reps, options.threads, [&](std::size_t slot, std::size_t begin,
                                               std::size_t end) {
        std::uint64_t local_sum = 0, local_sumsq = 0;
        std::vector<double> x(len + 1), y(len + 1);
        std::vector<std::uint8_t> avail(len + 1);
        for (std::size_t rep = begin; rep < end; ++rep) {
            Xoshiro256pp rng(mix_seed(options.seed, rep));
            generate_into(model.process, x, rng);
            for (std::size_t k = 0; k <= len; ++k)
                avail[k] = (k % static_cast<std::size_t>(T) == 0) ? 1
                           : (rng.next_bernoulli(model.p) ? 1 : 0);
            double avail_max = x[0];
            for (std::size_t k = 1; k <= len; ++k) {
                const std::size_t lo = (k - 1) / static_cast<std::size_t>(T) *
                                       static_cast<std::size_t>(T);
                if (lo == k - 1) avail_max = x[lo];
                y[k] = avail[k] ? x[k] : avail_max;
                if (avail[k]) avail_max = std::max(avail_max, x[k]);
            }
            std::uint64_t fired = 0;
            for (int i = 1; i <= T; ++i) {
                if (!(y[static_cast<std::size_t>(i)] > u)) continue;
                bool mid_below = true;
                for (int k = i + 1; k <= i + s - 1 && mid_below; ++k)
                    mid_below = !(y[static_cast<std::size_t>(k)] > u);
                if (mid_below) ++fired;
            }
            local_sum += fired;
            local_sumsq += fired * fired;
        }
        part_sum[slot] += local_sum;
        part_sumsq[slot] += local_sumsq;
    });

    std::uint64_t total = 0, total_sq = 0;
    for (std::size_t k = 0; k < part_sum.size(); ++k) {
        total += part_sum[k];
        total_sq += part_sumsq[k];
    }
    if (total == 0)
        throw undefined_estimate_error(
            "plug-in event never fired; raise reps or tau, or lower n");

    const TauDecomposition taud = tau_for_model(model, options.tau_x);
    const double mean = static_cast<double>(total) / static_cast<double>(reps);
    const double mean_sq = static_cast<double>(total_sq) / static_cast<double>(reps);
    const double var = std::max(0.0, mean_sq - mean * mean);
    const double scale = static_cast<double>(options.n) / (taud.tau * static_cast<double>(T));

    ThetaEstimate est;
    est.method = ThetaMethod::plugin;
    est.level = u;
    est.run_length_or_s = s;
    est.value = scale * mean;
    est.std_error = scale * std::sqrt(var / static_cast<double>(reps));
    est.exceedance_count = total;
    est.cluster_count = total;
    return est;
}

} // namespace perimax
