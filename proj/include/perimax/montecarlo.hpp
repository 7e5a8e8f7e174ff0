#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "perimax/estimation.hpp"
#include "perimax/stats.hpp"

namespace perimax {

// Generic replication harness: result[i] is produced from the generator
// seeded with mix_seed(master_seed, i), so the output is independent of
// execution order and worker count. Results are written into their own
// slots and any reduction happens afterwards, serially, in index order.
std::vector<double> run_replications(std::size_t reps, std::uint64_t master_seed, int threads,
                                     const std::function<double(std::size_t, Xoshiro256pp&)>& body);

// The finite-sample study of the p estimator over a (p, n) grid:
// `reps` independent series per cell, estimator applied to each, summarized
// as mean / bias / sample sd / rmse.
struct PStudyOptions {
    std::vector<double> ps{0.10, 0.25, 0.50, 0.75, 0.90};
    std::vector<std::size_t> ns{250, 1000, 5000};
    std::size_t reps = 1000;
    int period = 2;
    ProcessConfig process = moving_maxima_process();
    // The moving-maxima default repeats values at adjacent indices with
    // probability 1/3, which inflates the value-equality stagnation count;
    // the mask rule counts the intended all-imputed event, and is what the
    // published study's numbers correspond to.
    StagnationRule rule = StagnationRule::imputation_mask;
    std::uint64_t master_seed = 20240901;
    int threads = 0;
};

struct PStudyCell {
    double p = 0.0;
    std::size_t n = 0;
    SummaryStats stats;
};

std::vector<PStudyCell> p_study(const PStudyOptions& options);

void write_p_study_csv(std::ostream& out, std::span<const PStudyCell> cells);

// Side-by-side extremal index estimates for one model.
struct ThetaCompareOptions {
    double tau_x = 20.0;
    std::size_t runs_n = 200'000;   // path length per runs-declustering replication
    std::size_t runs_paths = 150;   // pooled replications
    int run_length = 0;             // 0 means T+1
    PluginOptions plugin;
    bool want_closed = true;
    bool want_plugin = true;
    bool want_runs = true;
    std::uint64_t master_seed = 7;
    int threads = 0;
};

struct ThetaReport {
    ModelConfig model;
    TauDecomposition tau;
    double level = 0.0; // runs-declustering level
    std::optional<double> closed_form;
    std::optional<ThetaEstimate> plugin;
    std::optional<ThetaEstimate> runs;
};

ThetaReport theta_compare(const ModelConfig& model, const ThetaCompareOptions& options);

// theta_Y over a (theta_x, p) grid from the armax T=3 closed form.
struct ThetaSurface {
    std::vector<double> theta_x_grid;
    std::vector<double> p_grid;
    std::vector<double> values; // row-major: values[i * p_grid.size() + j]
};

ThetaSurface theta_surface(std::span<const double> theta_x_grid, std::span<const double> p_grid);

void write_surface_csv(std::ostream& out, const ThetaSurface& surface);

// KS distance between the empirical law of { Y_{sT+j} : s = 1..samples } and
// the closed-form mixture marginal F_j.
struct MarginalCheckResult {
    double ks = 0.0;
    double critical_1pct = 0.0;
    std::size_t samples = 0;
};

MarginalCheckResult marginal_check(const ModelConfig& model, int j, std::size_t samples,
                                   std::uint64_t seed);

} // namespace perimax
