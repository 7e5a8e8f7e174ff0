// Command-line front end: simulate series, estimate p, reproduce the
// estimator study table, compare extremal index estimates, and trace the
// anti-clustering diagnostics. Everything is seeded and reproducible; CSV
// and JSON are the only output formats.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "perimax/diagnostics.hpp"
#include "perimax/errors.hpp"
#include "perimax/montecarlo.hpp"
#include "perimax/series_io.hpp"
#include "perimax/version.hpp"

namespace {

using nlohmann::json;
using namespace perimax;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitInconclusive = 2;
constexpr int kExitNumeric = 3;

struct ProcessFlags {
    std::string process = "mm";
    double t = 0.0;
    double alpha = 1.0;
    bool t_set = false;
};

void add_process_flags(CLI::App* cmd, ProcessFlags& flags) {
    cmd->add_option("--process", flags.process, "underlying process: iid|mm|armax")
        ->default_val("mm");
    cmd->add_option("--t", flags.t, "armax recursion coefficient in (0,1)")
        ->each([&flags](const std::string&) { flags.t_set = true; });
    cmd->add_option("--alpha", flags.alpha, "Frechet shape of the marginal")->default_val(1.0);
}

ProcessConfig make_process(const ProcessFlags& flags) {
    const ProcessKind kind = process_kind_from_string(flags.process);
    switch (kind) {
        case ProcessKind::iid: return iid_process(FrechetDist{flags.alpha, 1.0});
        case ProcessKind::moving_maxima: return moving_maxima_process();
        case ProcessKind::armax:
            if (!flags.t_set)
                throw config_error("--t is required for the armax process");
            return armax_process(flags.t, flags.alpha);
    }
    throw config_error("invalid process");
}

void write_text_atomic(const std::filesystem::path& path, const std::string& content) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw structural_error("cannot open '" + tmp.string() + "'");
        out << content;
    }
    std::filesystem::rename(tmp, path);
}

// Run manifest next to an output file: what produced it, with which seed,
// and how long it took.
void write_run_manifest(const std::filesystem::path& out_path, json spec, double wall_seconds) {
    json manifest{{"spec", std::move(spec)},
                  {"version", kVersion},
                  {"wall_time_s", wall_seconds}};
    write_text_atomic(out_path.string() + ".manifest.json", manifest.dump(2) + "\n");
}

class WallClock {
  public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

  private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

json theta_estimate_to_json(const ThetaEstimate& est) {
    return json{{"method", to_string(est.method)},
                {"value", est.value},
                {"std_error", est.std_error},
                {"level", est.level},
                {"s_or_run_length", est.run_length_or_s},
                {"exceedances", est.exceedance_count},
                {"clusters", est.cluster_count}};
}

int cmd_simulate(const ProcessFlags& pf, int T, double p, std::size_t n, std::uint64_t seed,
                 const std::string& out_path) {
    const ProcessConfig process = make_process(pf);
    Xoshiro256pp rng(seed);
    const std::uint64_t path_seed = rng.next_u64();
    const std::uint64_t mask_seed = rng.next_u64();
    const ProcessPath path = generate_path(process, n, path_seed);
    const ControlMask mask = generate_mask(n, T, p, mask_seed);
    const ImputedSeries series = impute(path, mask);
    write_series(out_path, series, SeriesFileHeader{ModelConfig{process, T, p}, path_seed,
                                                    mask_seed});
    std::size_t imputed_count = 0;
    for (std::size_t k = 1; k <= series.n(); ++k) imputed_count += series.imputed[k];
    std::cout << "wrote " << out_path << ": n=" << n << " T=" << T << " p=" << p
              << " imputed=" << imputed_count << "/" << n << "\n";
    return kExitOk;
}

int cmd_estimate_p(const std::string& in_path, const ProcessFlags& pf, int T, double p,
                   std::size_t n, std::uint64_t seed, const std::string& rule_name) {
    ImputedSeries series;
    double stated_p = 0.0;
    int period = 0;
    if (!in_path.empty()) {
        const LoadedSeries loaded = read_series(in_path);
        if (T > 0 && T != loaded.header.model.period)
            throw config_error("period mismatch: file has T=" +
                               std::to_string(loaded.header.model.period) + ", flag says T=" +
                               std::to_string(T));
        series = loaded.series;
        stated_p = loaded.header.model.p;
        period = loaded.header.model.period;
    } else {
        // Inline simulation: same construction as `simulate` without a file.
        const ProcessConfig process = make_process(pf);
        Xoshiro256pp rng(seed);
        const ProcessPath path = generate_path(process, n, rng.next_u64());
        const ControlMask mask = generate_mask(n, T > 0 ? T : 2, p, rng.next_u64());
        series = impute(path, mask);
        stated_p = p;
        period = mask.period;
    }
    const StagnationRule rule = stagnation_rule_from_string(rule_name);
    const PHatResult fit = estimate_p(series, rule);
    const FrequencyResult freq = stagnation_frequency(series, rule);
    json out{{"p_hat", fit.p_hat},
             {"m", fit.block_count},
             {"indicator_sum", fit.indicator_sum},
             {"stagnation_freq", freq.frequency},
             {"stagnation_freq_se", freq.std_error},
             {"stagnation_probability", stagnation_probability(stated_p, period)},
             {"stagnation_rule", to_string(rule)}};
    std::cout << out.dump(2) << "\n";
    return kExitOk;
}

int cmd_table1(const std::vector<double>& ps, const std::vector<std::size_t>& ns,
               std::size_t reps, int T, const ProcessFlags& pf, const std::string& rule_name,
               std::uint64_t seed, int threads, const std::string& out_path) {
    const WallClock clock;
    PStudyOptions options;
    if (!ps.empty()) options.ps = ps;
    if (!ns.empty()) options.ns = ns;
    options.reps = reps;
    options.period = T;
    options.process = make_process(pf);
    options.rule = stagnation_rule_from_string(rule_name);
    options.master_seed = seed;
    options.threads = threads;
    const auto cells = p_study(options);
    std::ostringstream csv;
    csv.precision(17);
    write_p_study_csv(csv, cells);
    if (out_path.empty())
        std::cout << csv.str();
    else {
        write_text_atomic(out_path, csv.str());
        write_run_manifest(out_path,
                           json{{"command", "p-study"},
                                {"p_grid", options.ps},
                                {"n_grid", options.ns},
                                {"reps", reps},
                                {"T", T},
                                {"process", to_string(options.process.kind)},
                                {"stagnation_rule", to_string(options.rule)},
                                {"seed", seed},
                                {"threads", threads}},
                           clock.seconds());
        std::cout << "wrote " << out_path << " (" << cells.size() << " cells, reps=" << reps
                  << ")\n";
    }
    return kExitOk;
}

int cmd_theta(const ProcessFlags& pf, int T, double p, const std::string& methods, double tau,
              std::size_t n, const std::vector<std::size_t>& n_grid, std::size_t reps,
              std::size_t paths, int s, int run_length, std::uint64_t seed, int threads,
              const std::string& out_path) {
    const ModelConfig model{make_process(pf), T, p};
    ThetaCompareOptions options;
    options.tau_x = tau;
    options.plugin.n = n;
    options.plugin.reps = reps;
    options.plugin.s = s;
    options.runs_paths = paths;
    options.run_length = run_length;
    options.master_seed = seed;
    options.threads = threads;
    options.want_closed = methods.find("closed") != std::string::npos;
    options.want_plugin = methods.find("plugin") != std::string::npos;
    options.want_runs = methods.find("runs") != std::string::npos;
    if (!options.want_closed && !options.want_plugin && !options.want_runs)
        throw config_error("--methods must select at least one of closed,plugin,runs");
    if (options.want_closed && !options.want_plugin && !options.want_runs &&
        !theta_y_closed_form_supported(model))
        theta_y_closed_form(model); // throws, naming the Monte Carlo fallback

    const ThetaReport report = theta_compare(model, options);

    // Optional plug-in trend over an n grid: the estimate is taken at fixed
    // n, so the trend is how convergence is judged.
    json trend = json::array();
    if (!n_grid.empty() && options.want_plugin) {
        for (std::size_t i = 0; i < n_grid.size(); ++i) {
            PluginOptions po = options.plugin;
            po.tau_x = tau;
            po.n = n_grid[i];
            po.seed = mix_seed(seed, 100 + i);
            po.threads = threads;
            const ThetaEstimate est = plugin_theta(model, po);
            trend.push_back(json{{"n", n_grid[i]},
                                 {"value", est.value},
                                 {"std_error", est.std_error}});
        }
    }
    json out{{"process", to_string(model.process.kind)},
             {"T", T},
             {"p", p},
             {"theta_x", model.process.theta_x()},
             {"tau_x", report.tau.tau_x},
             {"tau", report.tau.tau},
             {"tau_j", report.tau.tau_j},
             {"level", report.level}};
    if (report.closed_form) out["closed"] = *report.closed_form;
    if (report.plugin) out["plugin"] = theta_estimate_to_json(*report.plugin);
    if (report.runs) out["runs"] = theta_estimate_to_json(*report.runs);
    if (!trend.empty()) out["plugin_trend"] = trend;
    const std::string text = out.dump(2) + "\n";
    if (out_path.empty())
        std::cout << text;
    else {
        write_text_atomic(out_path, text);
        std::cout << "wrote " << out_path << "\n";
    }
    return kExitOk;
}

int cmd_theta_surface(std::size_t theta_steps, std::size_t p_steps, const std::string& out_path) {
    std::vector<double> th_grid, p_grid;
    for (std::size_t i = 1; i <= theta_steps; ++i)
        th_grid.push_back(static_cast<double>(i) / static_cast<double>(theta_steps));
    for (std::size_t j = 1; j < p_steps; ++j)
        p_grid.push_back(static_cast<double>(j) / static_cast<double>(p_steps));
    const ThetaSurface surface = theta_surface(th_grid, p_grid);
    std::ostringstream csv;
    csv.precision(17);
    write_surface_csv(csv, surface);
    if (out_path.empty())
        std::cout << csv.str();
    else {
        write_text_atomic(out_path, csv.str());
        std::cout << "wrote " << out_path << "\n";
    }
    return kExitOk;
}

int cmd_diagnose(const std::string& condition_name, const ProcessFlags& pf, int T, double p,
                 int s, double tau, const std::vector<std::size_t>& n_grid, double reps_per_n,
                 std::uint64_t seed, int threads, const std::string& out_path, bool identity_flag,
                 double identity_quantile, std::size_t identity_reps) {
    const WallClock clock;
    const ModelConfig model{make_process(pf), T, p};

    if (identity_flag) {
        const double level = model.process.marginal().quantile(identity_quantile);
        const TailIdentityResult res = tail_identity_check(model, level, identity_reps, seed, threads);
        json out{{"level", level},
                 {"quantile", identity_quantile},
                 {"lhs", res.lhs},
                 {"rhs", res.rhs},
                 {"rhs_scaled", res.rhs_scaled},
                 {"gap", res.gap},
                 {"std_error", res.std_error},
                 {"studentized", res.studentized},
                 {"reps", res.reps}};
        std::cout << out.dump(2) << "\n";
        return std::abs(res.studentized) <= 3.0 ? kExitOk : kExitInconclusive;
    }

    const ConditionKind kind = condition_kind_from_string(condition_name);
    ConditionOptions options;
    options.tau_x = tau;
    options.s = s;
    options.seed = seed;
    options.threads = threads;
    options.reps_per_n = reps_per_n;
    const ConditionTrace trace = condition_trace(kind, model, n_grid, options);
    const Verdict verdict = trend_report(trace, options.tau_x);

    std::ostringstream csv;
    csv.precision(17);
    write_trace_csv(csv, trace);
    if (out_path.empty())
        std::cout << csv.str();
    else {
        write_text_atomic(out_path, csv.str());
        write_run_manifest(out_path,
                           json{{"command", "diagnose"},
                                {"condition", to_string(kind)},
                                {"process", to_string(model.process.kind)},
                                {"T", T},
                                {"p", p},
                                {"s", trace.s},
                                {"tau", tau},
                                {"n_grid", std::vector<std::size_t>(n_grid.begin(), n_grid.end())},
                                {"reps_per_n", reps_per_n},
                                {"k_rule", trace.k_rule},
                                {"seed", seed},
                                {"threads", threads}},
                           clock.seconds());
        std::cout << "wrote " << out_path << "\n";
    }
    std::cout << "verdict: " << to_string(verdict) << "\n";
    return verdict == Verdict::inconclusive ? kExitInconclusive : kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"periodically controlled imputation model: simulation, estimation, diagnostics"};
    app.require_subcommand(1);

    // simulate
    auto* sim = app.add_subcommand("simulate", "generate a series file (CSV + JSON sidecar)");
    ProcessFlags sim_pf;
    int sim_T = 2;
    double sim_p = 0.5;
    std::size_t sim_n = 100;
    std::uint64_t sim_seed = 1;
    std::string sim_out;
    add_process_flags(sim, sim_pf);
    sim->add_option("--T", sim_T, "control period, T >= 2")->default_val(2);
    sim->add_option("--p", sim_p, "availability probability in (0,1)")->default_val(0.5);
    sim->add_option("--n", sim_n, "series length")->default_val(100);
    sim->add_option("--seed", sim_seed, "master seed")->default_val(1);
    sim->add_option("--out", sim_out, "output CSV path")->required();

    // estimate-p
    auto* est = app.add_subcommand("estimate-p",
                                   "estimate p from a series file or an inline simulation");
    ProcessFlags est_pf;
    std::string est_in, est_rule = "values";
    int est_T = 0;
    double est_p = 0.5;
    std::size_t est_n = 1000;
    std::uint64_t est_seed = 1;
    add_process_flags(est, est_pf);
    est->add_option("--in", est_in, "series CSV path (omit to simulate inline)");
    est->add_option("--T", est_T, "control period (validated against the file when --in)");
    est->add_option("--p", est_p, "availability probability for inline simulation")
        ->default_val(0.5);
    est->add_option("--n", est_n, "series length for inline simulation")->default_val(1000);
    est->add_option("--seed", est_seed, "seed for inline simulation")->default_val(1);
    est->add_option("--stagnation", est_rule, "stagnation rule: values|mask")
        ->default_val("values");

    // p_study
    auto* tab = app.add_subcommand("p-study", "estimator summary over a (p, n) grid");
    ProcessFlags tab_pf;
    std::vector<double> tab_ps;
    std::vector<std::size_t> tab_ns;
    std::size_t tab_reps = 1000;
    int tab_T = 2, tab_threads = 0;
    std::uint64_t tab_seed = 20240901;
    std::string tab_out, tab_rule = "mask";
    add_process_flags(tab, tab_pf);
    tab->add_option("--p-grid", tab_ps, "p values (default 0.1 0.25 0.5 0.75 0.9)");
    tab->add_option("--n-grid", tab_ns, "n values (default 250 1000 5000)");
    tab->add_option("--reps", tab_reps, "replications per cell")->default_val(1000);
    tab->add_option("--T", tab_T, "control period")->default_val(2);
    tab->add_option("--stagnation", tab_rule, "stagnation rule: values|mask")
        ->default_val("mask");
    tab->add_option("--seed", tab_seed, "master seed")->default_val(20240901);
    tab->add_option("--threads", tab_threads, "worker count (0 = auto)")->default_val(0);
    tab->add_option("--out", tab_out, "output CSV path (stdout when omitted)");

    // theta
    auto* theta = app.add_subcommand("theta", "extremal index: closed form vs estimators");
    ProcessFlags theta_pf;
    int theta_T = 2, theta_s = 0, theta_run = 0, theta_threads = 0;
    double theta_p = 0.5, theta_tau = 20.0;
    std::size_t theta_n = 10'000, theta_reps = 2'000'000, theta_paths = 150;
    std::uint64_t theta_seed = 7;
    std::string theta_methods = "closed,plugin,runs", theta_out;
    add_process_flags(theta, theta_pf);
    theta->add_option("--T", theta_T, "control period")->default_val(2);
    theta->add_option("--p", theta_p, "availability probability")->default_val(0.5);
    theta->add_option("--methods", theta_methods, "comma list of closed,plugin,runs")
        ->default_val("closed,plugin,runs");
    theta->add_option("--tau", theta_tau, "tail rate tau_x for the level u_n")->default_val(20.0);
    theta->add_option("--n", theta_n, "plug-in evaluation n")->default_val(10'000);
    std::vector<std::size_t> theta_ngrid;
    theta->add_option("--n-grid", theta_ngrid,
                      "also report the plug-in estimate over these n values");
    theta->add_option("--reps", theta_reps, "plug-in replications")->default_val(2'000'000);
    theta->add_option("--paths", theta_paths, "runs-declustering pooled paths")
        ->default_val(150);
    theta->add_option("--s", theta_s, "plug-in separation (default T+1)")->default_val(0);
    theta->add_option("--run-length", theta_run, "runs declustering run length (default T+1)")
        ->default_val(0);
    theta->add_option("--seed", theta_seed, "master seed")->default_val(7);
    theta->add_option("--threads", theta_threads, "worker count (0 = auto)")->default_val(0);
    theta->add_option("--out", theta_out, "output JSON path (stdout when omitted)");

    // theta-surface
    auto* surf = app.add_subcommand("theta-surface",
                                    "armax T=3 closed-form theta_Y over (theta_x, p)");
    std::size_t surf_th_steps = 20, surf_p_steps = 20;
    std::string surf_out;
    surf->add_option("--theta-steps", surf_th_steps, "grid steps over theta_x in (0,1]")
        ->default_val(20);
    surf->add_option("--p-steps", surf_p_steps, "grid steps over p in (0,1)")->default_val(20);
    surf->add_option("--out", surf_out, "output CSV path (stdout when omitted)");

    // diagnose
    auto* diag = app.add_subcommand("diagnose", "anti-clustering condition traces and checks");
    ProcessFlags diag_pf;
    std::string diag_condition = "sep", diag_out;
    bool diag_identity = false;
    int diag_T = 2, diag_s = 0, diag_threads = 0;
    double diag_p = 0.5, diag_tau = 20.0, diag_reps_per_n = 150.0, diag_identity_q = 0.95;
    std::vector<std::size_t> diag_grid{1000, 10'000, 100'000};
    std::size_t diag_identity_reps = 400'000;
    std::uint64_t diag_seed = 1;
    add_process_flags(diag, diag_pf);
    diag->add_option("--condition", diag_condition, "dts|sep|joint|d22")->default_val("sep");
    diag->add_option("--T", diag_T, "control period")->default_val(2);
    diag->add_option("--p", diag_p, "availability probability")->default_val(0.5);
    diag->add_option("--s", diag_s, "separation for dts (default T+1)")->default_val(0);
    diag->add_option("--tau", diag_tau, "tail rate tau_x")->default_val(20.0);
    diag->add_option("--n-grid", diag_grid, "ascending n grid")
        ->default_val(std::vector<std::size_t>{1000, 10'000, 100'000});
    diag->add_option("--reps-per-n", diag_reps_per_n, "replications per unit n")
        ->default_val(150.0);
    diag->add_option("--seed", diag_seed, "master seed")->default_val(1);
    diag->add_option("--threads", diag_threads, "worker count (0 = auto)")->default_val(0);
    diag->add_option("--out", diag_out, "trace CSV path (stdout when omitted)");
    diag->add_flag("--tail-identity", diag_identity,
                   "check the coupled block-tail identity instead of a trace");
    diag->add_option("--identity-quantile", diag_identity_q, "marginal quantile for the identity level")
        ->default_val(0.95);
    diag->add_option("--identity-reps", diag_identity_reps, "replications for the identity check")
        ->default_val(400'000);

    try {
        app.parse(argc, argv);
        if (sim->parsed())
            return cmd_simulate(sim_pf, sim_T, sim_p, sim_n, sim_seed, sim_out);
        if (est->parsed())
            return cmd_estimate_p(est_in, est_pf, est_T, est_p, est_n, est_seed, est_rule);
        if (tab->parsed())
            return cmd_table1(tab_ps, tab_ns, tab_reps, tab_T, tab_pf, tab_rule, tab_seed,
                              tab_threads, tab_out);
        if (theta->parsed())
            return cmd_theta(theta_pf, theta_T, theta_p, theta_methods, theta_tau, theta_n,
                             theta_ngrid, theta_reps, theta_paths, theta_s, theta_run,
                             theta_seed, theta_threads, theta_out);
        if (surf->parsed()) return cmd_theta_surface(surf_th_steps, surf_p_steps, surf_out);
        if (diag->parsed())
            return cmd_diagnose(diag_condition, diag_pf, diag_T, diag_p, diag_s, diag_tau,
                                diag_grid, diag_reps_per_n, diag_seed, diag_threads, diag_out,
                                diag_identity, diag_identity_q, diag_identity_reps);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    } catch (const config_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const structural_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const sample_too_short_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const undefined_estimate_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const unsupported_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
