#include "perimax/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "perimax/errors.hpp"
#include "perimax/parallel.hpp"
#include "perimax/rng.hpp"

namespace perimax {

std::string to_string(ConditionKind kind) {
    switch (kind) {
        case ConditionKind::dts_local: return "dts_local";
        case ConditionKind::gap_separated: return "gap_separated";
        case ConditionKind::gap_joint: return "gap_joint";
        case ConditionKind::d22_counter: return "d22_counter";
    }
    return "?";
}

ConditionKind condition_kind_from_string(const std::string& name) {
    if (name == "dts" || name == "dts_local") return ConditionKind::dts_local;
    if (name == "sep" || name == "gap_separated") return ConditionKind::gap_separated;
    if (name == "joint" || name == "gap_joint") return ConditionKind::gap_joint;
    if (name == "d22" || name == "d22_counter") return ConditionKind::d22_counter;
    throw config_error("unknown condition '" + name + "' (expected dts|sep|joint|d22)");
}

std::string to_string(Verdict verdict) {
    switch (verdict) {
        case Verdict::vanishing: return "vanishing";
        case Verdict::non_vanishing: return "non-vanishing";
        case Verdict::inconclusive: return "inconclusive";
    }
    return "?";
}

namespace {

std::size_t default_k(std::size_t n) {
    return static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(n))));
}

// Lazily grown imputed series driven by two per-replication streams: one for
// the underlying path, one for the availability bits. Values are produced in
// index order, so the draw sequence does not depend on how far the event
// evaluation needed to look.
class LazySeries {
  public:
    LazySeries(const ModelConfig& model, std::uint64_t x_seed, std::uint64_t u_seed)
        : model_(model), gen_(model.process, x_seed), rng_u_(u_seed) {
        y_.push_back(0.0); // index 0 placeholder, Y starts at 1
        avail_max_ = gen_.extend(0)[0];
    }

    // Ensures Y_1 .. Y_m are available.
    void extend(std::size_t m) {
        const auto& x = gen_.extend(m);
        const std::size_t T = static_cast<std::size_t>(model_.period);
        while (y_.size() <= m) {
            const std::size_t k = y_.size();
            const bool control = (k % T) == 0;
            const bool available = control || rng_u_.next_bernoulli(model_.p);
            const std::size_t lo = (k - 1) / T * T;
            if (lo == k - 1) avail_max_ = x[lo];
            y_.push_back(available ? x[k] : avail_max_);
            if (available) avail_max_ = std::max(avail_max_, x[k]);
        }
    }

    double y(std::size_t k) const { return y_[k]; }

    bool any_y_exceeds(std::size_t from, std::size_t to, double u) {
        extend(to);
        for (std::size_t k = from; k <= to; ++k)
            if (y_[k] > u) return true;
        return false;
    }

    bool all_y_below(std::size_t from, std::size_t to, double u) {
        if (from > to) return true; // empty range maximum is -inf
        extend(to);
        for (std::size_t k = from; k <= to; ++k)
            if (y_[k] > u) return false;
        return true;
    }

  private:
    ModelConfig model_;
    PathGenerator gen_;
    Xoshiro256pp rng_u_;
    std::vector<double> y_;
    double avail_max_ = 0.0;
};

struct CountAccumulator {
    std::uint64_t sum = 0;
    std::uint64_t sum_sq = 0;
};

} // namespace

ConditionPoint estimate_condition_point(ConditionKind kind, const ModelConfig& model,
                                        std::size_t n, std::size_t reps, double tau_x, int s,
                                        std::uint64_t seed, int threads) {
    model.validate();
    const int T = model.period;
    if (kind == ConditionKind::d22_counter && T != 2)
        throw config_error("the D_2^(2) counterexample trace is defined for T = 2");
    if (kind == ConditionKind::dts_local && s < 1) s = T + 1;
    const std::size_t k_n = default_k(n);
    const std::size_t r_n = n / (k_n * static_cast<std::size_t>(T));
    const std::size_t horizon_y = r_n * static_cast<std::size_t>(T);
    const std::size_t horizon_x = horizon_y + static_cast<std::size_t>(T);
    const double u = normalized_level(model.process, n, tau_x);

    const std::size_t prefix_y = static_cast<std::size_t>(T + std::max(s, 2) - 1);
    if ((kind == ConditionKind::dts_local || kind == ConditionKind::d22_counter) &&
        horizon_y < prefix_y + 1)
        throw config_error("block horizon too short for the requested s; raise n");

    std::vector<CountAccumulator> parts(chunk_slots(threads));

    parallel_chunks(reps, threads, [&](std::size_t slot, std::size_t begin, std::size_t end) {
        CountAccumulator acc;
        const std::size_t Ts = static_cast<std::size_t>(T);
        for (std::size_t rep = begin; rep < end; ++rep) {
            const std::uint64_t x_seed = mix_seed(seed, rep, 1);
            const std::uint64_t u_seed = mix_seed(seed, rep, 2);
            std::uint64_t fired = 0;
            switch (kind) {
                case ConditionKind::gap_separated:
                case ConditionKind::gap_joint: {
                    PathGenerator gen(model.process, x_seed);
                    const auto& x = gen.extend(Ts + 1);
                    double head = x[0];
                    for (std::size_t k = 1; k <= Ts; ++k) head = std::max(head, x[k]);
                    if (!(head > u)) break;
                    if (kind == ConditionKind::gap_separated && x[Ts + 1] > u) break;
                    const std::size_t tail_from = kind == ConditionKind::gap_separated ? Ts + 2 : Ts + 1;
                    const auto& xf = gen.extend(horizon_x);
                    for (std::size_t k = tail_from; k <= horizon_x; ++k) {
                        if (xf[k] > u) {
                            fired = 1;
                            break;
                        }
                    }
                    break;
                }
                case ConditionKind::dts_local: {
                    LazySeries series(model, x_seed, u_seed);
                    series.extend(static_cast<std::size_t>(T + s - 1));
                    for (int i = 1; i <= T; ++i) {
                        const std::size_t iu = static_cast<std::size_t>(i);
                        if (!(series.y(iu) > u)) continue;
                        if (!series.all_y_below(iu + 1, iu + static_cast<std::size_t>(s) - 1, u))
                            continue;
                        if (series.any_y_exceeds(iu + static_cast<std::size_t>(s), horizon_y, u))
                            ++fired;
                    }
                    break;
                }
                case ConditionKind::d22_counter: {
                    LazySeries series(model, x_seed, u_seed);
                    series.extend(2);
                    if (!(series.y(1) > u) || series.y(2) > u) break;
                    if (series.any_y_exceeds(3, horizon_y, u)) fired = 1;
                    break;
                }
            }
            acc.sum += fired;
            acc.sum_sq += fired * fired;
        }
        parts[slot].sum += acc.sum;
        parts[slot].sum_sq += acc.sum_sq;
    });

    std::uint64_t total = 0, total_sq = 0;
    for (const auto& part : parts) {
        total += part.sum;
        total_sq += part.sum_sq;
    }

    const double r = static_cast<double>(reps);
    const double mean = static_cast<double>(total) / r;
    const double var = std::max(0.0, static_cast<double>(total_sq) / r - mean * mean);
    const double scale =
        kind == ConditionKind::dts_local ? static_cast<double>(n) / T : static_cast<double>(n);

    ConditionPoint point;
    point.n = n;
    point.k_n = k_n;
    point.reps = reps;
    point.zero_events = total == 0;
    point.estimate = scale * mean;
    point.std_error = point.zero_events ? scale * 3.0 / r : scale * std::sqrt(var / r);
    return point;
}

ConditionTrace condition_trace(ConditionKind kind, const ModelConfig& model,
                               std::span<const std::size_t> n_grid,
                               const ConditionOptions& options) {
    if (n_grid.empty() || !std::is_sorted(n_grid.begin(), n_grid.end()) ||
        std::adjacent_find(n_grid.begin(), n_grid.end()) != n_grid.end())
        throw config_error("n grid must be non-empty and strictly increasing");
    ConditionTrace trace;
    trace.condition = kind;
    trace.model = model;
    trace.tau_x = options.tau_x;
    trace.s = kind == ConditionKind::dts_local
                  ? (options.s > 0 ? options.s : model.period + 1)
                  : 0;
    trace.points.reserve(n_grid.size());
    for (std::size_t g = 0; g < n_grid.size(); ++g) {
        const std::size_t n = n_grid[g];
        const std::size_t reps = std::max<std::size_t>(
            options.min_reps,
            static_cast<std::size_t>(std::ceil(options.reps_per_n * static_cast<double>(n))));
        trace.points.push_back(estimate_condition_point(kind, model, n, reps, options.tau_x,
                                                        trace.s, mix_seed(options.seed, g + 1),
                                                        options.threads));
    }
    return trace;
}

Verdict trend_report(const ConditionTrace& trace, double tau) {
    if (trace.points.size() < 3)
        throw config_error("trend verdict needs at least three grid points");
    const auto& pts = trace.points;
    bool monotone = true;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const double slack = 2.0 * std::hypot(pts[i].std_error, pts[i + 1].std_error);
        if (pts[i + 1].estimate > pts[i].estimate + slack) monotone = false;
    }
    const double first = pts.front().estimate;
    const double last = pts.back().estimate;
    if (last < 0.1 * first && monotone) return Verdict::vanishing;
    if (last > 0.5 * tau && pts.back().std_error < 0.1 * tau) return Verdict::non_vanishing;
    return Verdict::inconclusive;
}

void write_trace_csv(std::ostream& out, const ConditionTrace& trace) {
    out << "n,estimate,std_error,k_n,tau,condition,s\n";
    for (const auto& point : trace.points) {
        out << point.n << ',' << point.estimate << ',' << point.std_error << ',' << point.k_n
            << ',' << trace.tau_x << ',' << to_string(trace.condition) << ',' << trace.s << '\n';
    }
}

TailIdentityResult tail_identity_check(const ModelConfig& model, double level, std::size_t reps,
                            std::uint64_t seed, int threads) {
    model.validate();
    if (model.process.marginal().sf(level) > 0.1)
        throw config_error("identity check level must sit in the upper tail "
                           "(marginal exceedance probability <= 0.1)");
    const std::size_t T = static_cast<std::size_t>(model.period);
    const std::size_t len = 2 * T;

    struct Counts {
        std::uint64_t lhs = 0, rhs = 0, both = 0;
    };
    std::vector<Counts> parts(chunk_slots(threads));

    parallel_chunks(reps, threads, [&](std::size_t slot, std::size_t begin, std::size_t end) {
        Counts acc;
        std::vector<double> x(len + 1), y(len + 1);
        for (std::size_t rep = begin; rep < end; ++rep) {
            Xoshiro256pp rng_x(mix_seed(seed, rep, 1));
            Xoshiro256pp rng_u(mix_seed(seed, rep, 2));
            generate_into(model.process, x, rng_x);
            double avail_max = x[0];
            for (std::size_t k = 1; k <= len; ++k) {
                const bool control = (k % T) == 0;
                const bool available = control || rng_u.next_bernoulli(model.p);
                const std::size_t lo = (k - 1) / T * T;
                if (lo == k - 1) avail_max = x[lo];
                y[k] = available ? x[k] : avail_max;
                if (available) avail_max = std::max(avail_max, x[k]);
            }
            bool lhs = y[T] > level;
            for (std::size_t k = T + 1; k <= 2 * T && lhs; ++k) lhs = !(y[k] > level);
            bool rhs = x[T] > level;
            for (std::size_t k = T + 1; k <= 2 * T && rhs; ++k) rhs = !(x[k] > level);
            acc.lhs += lhs ? 1 : 0;
            acc.rhs += rhs ? 1 : 0;
            acc.both += (lhs && rhs) ? 1 : 0;
        }
        parts[slot].lhs += acc.lhs;
        parts[slot].rhs += acc.rhs;
        parts[slot].both += acc.both;
    });

    std::uint64_t nl = 0, nr = 0, nb = 0;
    for (const auto& part : parts) {
        nl += part.lhs;
        nr += part.rhs;
        nb += part.both;
    }
    if (nl == 0 && nr == 0)
        throw undefined_estimate_error("no qualifying tail events; raise reps or lower the level");

    const double r = static_cast<double>(reps);
    const double c = std::pow(model.p, static_cast<double>(T - 1));
    TailIdentityResult res;
    res.reps = reps;
    res.lhs = static_cast<double>(nl) / r;
    res.rhs = static_cast<double>(nr) / r;
    res.rhs_scaled = c * res.rhs;
    res.gap = res.lhs - res.rhs_scaled;
    const double var_l = res.lhs * (1.0 - res.lhs);
    const double var_r = res.rhs * (1.0 - res.rhs);
    const double cov = static_cast<double>(nb) / r - res.lhs * res.rhs;
    const double var_gap = std::max(0.0, var_l + c * c * var_r - 2.0 * c * cov);
    res.std_error = std::sqrt(var_gap / r);
    res.studentized = res.gap == 0.0 ? 0.0 : res.gap / res.std_error;
    return res;
}

} // namespace perimax
