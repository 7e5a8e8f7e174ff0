#include "perimax/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <string>

#include "perimax/errors.hpp"

namespace perimax {

void ModelConfig::validate() const {
    process.validate();
    if (period < 2) throw config_error("control period T must be at least 2");
    if (!(p > 0.0 && p <= 1.0)) throw config_error("availability probability p must lie in (0,1]");
}

double stagnation_probability(double p, int period) {
    if (period < 2) throw config_error("stagnation probability needs T >= 2");
    if (!(p > 0.0 && p <= 1.0)) throw config_error("p must lie in (0,1]");
    return std::pow(1.0 - p, period - 1);
}

namespace {

double joint_cdf_iid(const FrechetDist& dist, std::size_t count, double x) {
    return std::pow(dist.cdf(x), static_cast<double>(count));
}

double joint_cdf_moving_maxima(std::span<const std::size_t> indices, double x) {
    // X_i <= x pins Z_i and Z_{i-1} at 2x; count the distinct innovations.
    std::set<long long> pinned;
    for (std::size_t i : indices) {
        pinned.insert(static_cast<long long>(i) - 1);
        pinned.insert(static_cast<long long>(i));
    }
    return std::pow(unit_frechet().cdf(2.0 * x), static_cast<double>(pinned.size()));
}

double joint_cdf_armax(const ProcessConfig& config, std::span<const std::size_t> indices,
                       double x) {
    // Backward pass: X_m <= b forces X_{m-1} <= b/t and W_m <= b/t. The
    // effective bound at each index is the minimum of its own constraint
    // (x when the index is selected) and the inherited one.
    const FrechetDist h = config.dist;
    const FrechetDist l = config.armax_innovation();
    const std::size_t top = indices.back();
    const double inf = std::numeric_limits<double>::infinity();
    double prob = 1.0;
    double inherited = inf;
    std::size_t next_sel = indices.size(); // walk selected indices from the back
    for (std::size_t m = top + 1; m-- > 0;) {
        double own = inf;
        if (next_sel > 0 && indices[next_sel - 1] == m) {
            own = x;
            --next_sel;
        }
        const double bound = std::min(own, inherited);
        if (m == 0) {
            prob *= h.cdf(bound);
        } else {
            if (bound < inf) prob *= l.cdf(bound / config.t);
            inherited = bound / config.t;
        }
    }
    return prob;
}

} // namespace

double joint_cdf_common_level(const ProcessConfig& config, std::span<const std::size_t> indices,
                              double x) {
    config.validate();
    if (indices.empty()) return 1.0;
    if (!std::is_sorted(indices.begin(), indices.end()) ||
        std::adjacent_find(indices.begin(), indices.end()) != indices.end())
        throw structural_error("joint cdf indices must be strictly increasing");
    if (x <= 0.0) return 0.0;
    switch (config.kind) {
        case ProcessKind::iid: return joint_cdf_iid(config.dist, indices.size(), x);
        case ProcessKind::moving_maxima: return joint_cdf_moving_maxima(indices, x);
        case ProcessKind::armax: return joint_cdf_armax(config, indices, x);
    }
    throw config_error("invalid process kind");
}

double imputation_window_cdf(const ModelConfig& model, int j, double x) {
    model.validate();
    if (j < 1 || j >= model.period)
        throw structural_error("window cdf defined for offsets j in 1..T-1");
    if (j > 20) throw unsupported_error("window offset too large for subset enumeration");
    const int gaps = j - 1; // indices 1..j-1 may or may not be available
    const double p = model.p;
    double total = 0.0;
    std::vector<std::size_t> selected;
    for (unsigned mask = 0; mask < (1u << gaps); ++mask) {
        selected.clear();
        selected.push_back(0); // the control index is always available
        int bits = 0;
        for (int i = 0; i < gaps; ++i) {
            if (mask & (1u << i)) {
                selected.push_back(static_cast<std::size_t>(i + 1));
                ++bits;
            }
        }
        const double weight = std::pow(p, bits) * std::pow(1.0 - p, gaps - bits);
        total += weight * joint_cdf_common_level(model.process, selected, x);
    }
    return total;
}

double marginal_cdf_fj(const ModelConfig& model, int j, double x) {
    model.validate();
    if (j < 0 || j >= model.period)
        throw structural_error("marginal offset j must lie in 0..T-1");
    const double f = model.process.marginal().cdf(x);
    if (j <= 1) return f;
    return model.p * f + (1.0 - model.p) * imputation_window_cdf(model, j, x);
}

TauDecomposition tau_combined(double p, int period, double tau_x, std::span<const double> tau_j) {
    if (period < 2) throw config_error("tau combination needs T >= 2");
    if (!(tau_x > 0.0)) throw config_error("tau_x must be positive");
    const std::size_t expected = static_cast<std::size_t>(period - 2);
    if (tau_j.size() != expected)
        throw structural_error("expected " + std::to_string(expected) +
                               " tau_j entries for T = " + std::to_string(period) + ", got " +
                               std::to_string(tau_j.size()));
    TauDecomposition d;
    d.tau_x = tau_x;
    d.tau_j.assign(tau_j.begin(), tau_j.end());
    double sum = 0.0;
    for (double tj : tau_j) sum += tj;
    const double T = static_cast<double>(period);
    d.tau = (((T - 2.0) * p + 2.0) * tau_x + (1.0 - p) * sum) / T;
    return d;
}

double tau_j2_armax_t3(double tau_x, double p, double theta_x) {
    return tau_x * (1.0 + p * theta_x);
}

double tau_j2_iid_t3(double tau_x, double p) { return tau_x * (1.0 + p); }

TauDecomposition tau_for_model(const ModelConfig& model, double tau_x, std::size_t n) {
    model.validate();
    const int T = model.period;
    std::vector<double> tau_j;
    if (T > 2) {
        const double u = normalized_level(model.process, n, tau_x);
        tau_j.reserve(static_cast<std::size_t>(T - 2));
        for (int j = 2; j <= T - 1; ++j)
            tau_j.push_back(static_cast<double>(n) *
                            (1.0 - imputation_window_cdf(model, j, u)));
    }
    return tau_combined(model.p, T, tau_x, tau_j);
}

double theta_y_closed_form(const ModelConfig& model) {
    model.validate();
    const double p = model.p;
    const double th = model.process.theta_x();
    if (model.process.kind == ProcessKind::moving_maxima && model.period == 2) return 0.5;
    if (model.process.kind == ProcessKind::armax && model.period == 2)
        return th + th * th * (p - 1.0) / 2.0;
    if (model.process.kind == ProcessKind::armax && model.period == 3) {
        const double num =
            3.0 * th + th * th * (-3.0 + 4.0 * p - p * p) + th * th * th * (1.0 - p) * (1.0 - p);
        return num / (3.0 + p * (1.0 - p) * th);
    }
    if (model.process.kind == ProcessKind::iid && model.period == 3)
        return (1.0 + 2.0 * p) / (3.0 + p * (1.0 - p));
    throw unsupported_error("no closed-form extremal index for process '" +
                            to_string(model.process.kind) + "' with T = " +
                            std::to_string(model.period) +
                            "; use the Monte Carlo plug-in estimator instead");
}

bool theta_y_closed_form_supported(const ModelConfig& model) {
    const auto k = model.process.kind;
    return (k == ProcessKind::moving_maxima && model.period == 2) ||
           (k == ProcessKind::armax && (model.period == 2 || model.period == 3)) ||
           (k == ProcessKind::iid && model.period == 3);
}

double theta_y_mm_t2_recombined(double p) {
    // tau cancels between the three block-tail limits and the 1/(2 tau)
    // prefactor, so any positive value works.
    const double tau = 1.0;
    const double p12 =
        (tau / 2.0) * p * (1.0 - p) + tau * (1.0 - p) * (1.0 - p) + tau * p * (1.0 - p);
    return 0.25 * (p * p + p) + p12 / (2.0 * tau);
}

double armax_tail_limit(ArmaxTailKind kind, int j, double tau_x, double theta_x, double alpha,
                        double t) {
    if (!(t > 0.0 && t < 1.0) || !(alpha > 0.0))
        throw config_error("armax tail limits need t in (0,1) and alpha > 0");
    const double ta = std::pow(t, alpha);
    switch (kind) {
        case ArmaxTailKind::h_gap: {
            if (j < 0) throw structural_error("h_gap needs j >= 0");
            double geo = 0.0;
            for (int k = 0; k <= j; ++k) geo += std::pow(ta, k);
            return tau_x * theta_x * geo;
        }
        case ArmaxTailKind::l_power:
            if (j < 1) throw structural_error("l_power needs j >= 1");
            return std::pow(ta, j - 1) * tau_x * theta_x;
        case ArmaxTailKind::l_mixed:
            if (j < 1) throw structural_error("l_mixed needs j >= 1");
            return tau_x * theta_x * (static_cast<double>(j) + ta);
    }
    throw config_error("invalid tail kind");
}

double armax_tail_finite_n(ArmaxTailKind kind, int j, std::size_t n, double tau_x, double alpha,
                           double t) {
    const ProcessConfig config = armax_process(t, alpha);
    const double u = normalized_level(config, n, tau_x);
    const FrechetDist h = config.dist;
    const FrechetDist l = config.armax_innovation();
    const double dn = static_cast<double>(n);
    switch (kind) {
        case ArmaxTailKind::h_gap:
            return dn * (h.cdf(u / std::pow(t, j + 1)) - h.cdf(u));
        case ArmaxTailKind::l_power:
            return dn * l.sf(u / std::pow(t, j));
        case ArmaxTailKind::l_mixed:
            return dn * (1.0 - std::pow(l.cdf(u / t), j) * l.cdf(u / (t * t)));
    }
    throw config_error("invalid tail kind");
}

} // namespace perimax
