#include "perimax/imputation.hpp"

#include <algorithm>
#include <string>

#include "perimax/errors.hpp"
#include "perimax/rng.hpp"

namespace perimax {

ControlMask generate_mask(std::size_t n, int period, double p, std::uint64_t seed) {
    if (n < 1) throw config_error("mask length n must be at least 1");
    if (period < 2)
        throw config_error("control period T must be at least 2 (T = 1 means nothing is ever missing)");
    if (!(p > 0.0 && p <= 1.0))
        throw config_error("availability probability p must lie in (0,1], got " + std::to_string(p));
    ControlMask mask{{}, period, p, seed};
    mask.u.resize(n + 1);
    Xoshiro256pp rng(seed);
    const std::size_t T = static_cast<std::size_t>(period);
    for (std::size_t k = 0; k <= n; ++k) {
        if (k % T == 0)
            mask.u[k] = 1;
        else
            mask.u[k] = rng.next_bernoulli(p) ? 1 : 0;
    }
    return mask;
}

ControlMask full_mask(std::size_t n, int period) {
    if (n < 1) throw config_error("mask length n must be at least 1");
    if (period < 2) throw config_error("control period T must be at least 2");
    ControlMask mask{{}, period, 1.0, 0};
    mask.u.assign(n + 1, 1);
    return mask;
}

ImputedSeries impute(const ProcessPath& x, const ControlMask& mask) {
    const std::size_t n = x.n();
    if (mask.u.size() != x.values.size())
        throw structural_error("path and mask lengths differ (" +
                               std::to_string(x.values.size()) + " vs " +
                               std::to_string(mask.u.size()) + ")");
    ImputedSeries series{x, mask, {}, {}};
    series.y.resize(n + 1, 0.0);
    series.imputed.resize(n + 1, 0);
    const std::size_t T = static_cast<std::size_t>(mask.period);

    // Running maximum of the available observations in the current control
    // window; reset whenever the window's control index advances.
    double avail_max = x.values[0];
    for (std::size_t k = 1; k <= n; ++k) {
        const std::size_t lo = (k - 1) / T * T;
        if (lo == k - 1) avail_max = x.values[lo]; // new window, U_lo = 1 always
        if (mask.u[k]) {
            series.y[k] = x.values[k];
            series.imputed[k] = 0;
        } else {
            series.y[k] = avail_max;
            series.imputed[k] = 1;
        }
        if (mask.u[k]) avail_max = std::max(avail_max, x.values[k]);
    }
    return series;
}

std::size_t block_count(std::size_t n, int period) {
    const std::size_t T = static_cast<std::size_t>(period);
    const std::size_t whole = (n + 1) / T;
    return whole > 0 ? whole - 1 : 0;
}

namespace {

void check_block(const ImputedSeries& series, std::size_t s) {
    const std::size_t T = static_cast<std::size_t>(series.period());
    if (s < 1 || s * T + T - 1 > series.n())
        throw structural_error("block index s = " + std::to_string(s) +
                               " out of range for n = " + std::to_string(series.n()));
}

} // namespace

bool stagnation_indicator(const ImputedSeries& series, std::size_t s) {
    check_block(series, s);
    const std::size_t T = static_cast<std::size_t>(series.period());
    const double anchor = series.y[s * T];
    for (std::size_t j = 1; j < T; ++j)
        if (series.y[s * T + j] != anchor) return false;
    return true;
}

bool stagnation_indicator_mask(const ImputedSeries& series, std::size_t s) {
    check_block(series, s);
    const std::size_t T = static_cast<std::size_t>(series.period());
    for (std::size_t j = 1; j < T; ++j)
        if (series.mask.u[s * T + j]) return false;
    return true;
}

} // namespace perimax
